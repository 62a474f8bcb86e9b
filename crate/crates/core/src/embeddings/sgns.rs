//! Negative-sampling machinery shared by skip-gram and PV-DBOW.
//!
//! For an input vector `v` and output rows `u_k` with labels (true for the
//! observed token, false for sampled negatives), the loss of one step is
//!
//!   L = sum_k softplus(-s_k) for positives, softplus(s_k) for negatives,
//!
//! with s_k = v . u_k, i.e. the negative log likelihood under the logistic
//! model. dL/ds_k = sigmoid(s_k) - label.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{axpy, dot, sigmoid, softplus, Mat};

/// Negative-sample source: draws term indices proportional to
/// count^(3/4), the unigram-power distribution.
#[derive(Debug, Clone)]
pub struct UnigramTable {
    cdf: Vec<f64>,
}

impl UnigramTable {
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::invalid("unigram table: empty vocabulary"));
        }
        let mut cdf = Vec::with_capacity(counts.len());
        let mut acc = 0.0;
        for &c in counts {
            acc += (c as f64).powf(0.75);
            cdf.push(acc);
        }
        if acc <= 0.0 {
            return Err(Error::invalid("unigram table: all counts are zero"));
        }
        Ok(UnigramTable { cdf })
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> u32 {
        let total = *self.cdf.last().unwrap();
        let x = rng.random::<f64>() * total;
        // First index with cdf > x.
        let mut lo = 0usize;
        let mut hi = self.cdf.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.cdf[mid] > x {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo as u32
    }

    pub fn len(&self) -> usize {
        self.cdf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cdf.is_empty()
    }
}

/// Loss and analytic gradients for one negative-sampling step, exposed for
/// finite-difference checking. Returns (loss, d_input, d_outputs).
pub fn sgns_loss_and_grads(
    input: &[f64],
    outputs: &[(&[f64], bool)],
) -> (f64, Vec<f64>, Vec<Vec<f64>>) {
    let mut loss = 0.0;
    let mut d_input = vec![0.0; input.len()];
    let mut d_outputs = Vec::with_capacity(outputs.len());
    for &(out, label) in outputs {
        let s = dot(input, out);
        loss += if label { softplus(-s) } else { softplus(s) };
        let g = sigmoid(s) - if label { 1.0 } else { 0.0 };
        axpy(&mut d_input, g, out);
        let mut d_out = vec![0.0; out.len()];
        axpy(&mut d_out, g, input);
        d_outputs.push(d_out);
    }
    (loss, d_input, d_outputs)
}

/// One in-place SGD step: the input row `center` of `input` and the sampled
/// rows of `output` move along the negative gradient. Gradients are taken
/// simultaneously (input deltas accumulate against pre-update output rows).
/// Returns the step loss.
pub fn sgns_step(
    input: &mut Mat,
    output: &mut Mat,
    center: usize,
    samples: &[(u32, bool)],
    lr: f64,
) -> f64 {
    let mut loss = 0.0;
    let mut d_input = vec![0.0; input.cols()];
    for &(idx, label) in samples {
        let s = dot(input.row(center), output.row(idx as usize));
        loss += if label { softplus(-s) } else { softplus(s) };
        let g = sigmoid(s) - if label { 1.0 } else { 0.0 };
        axpy(&mut d_input, g, output.row(idx as usize));
        // d_out = g * input_row, applied in place.
        let in_row = input.row(center);
        let out_row = output.row_mut(idx as usize);
        for (o, &i) in out_row.iter_mut().zip(in_row) {
            *o -= lr * g * i;
        }
    }
    axpy(input.row_mut(center), -lr, &d_input);
    loss
}

/// Like [`sgns_step`] but with the output matrix frozen; used for held-out
/// document-vector inference.
pub fn sgns_step_input_only(
    input_row: &mut [f64],
    output: &Mat,
    samples: &[(u32, bool)],
    lr: f64,
) -> f64 {
    let mut loss = 0.0;
    let mut d_input = vec![0.0; input_row.len()];
    for &(idx, label) in samples {
        let out = output.row(idx as usize);
        let s = dot(input_row, out);
        loss += if label { softplus(-s) } else { softplus(s) };
        let g = sigmoid(s) - if label { 1.0 } else { 0.0 };
        axpy(&mut d_input, g, out);
    }
    axpy(input_row, -lr, &d_input);
    loss
}

/// Draw the negative samples for one positive target. Draws that hit the
/// positive are skipped, matching the usual toolkit behavior.
pub fn draw_samples(
    table: &UnigramTable,
    positive: u32,
    negatives: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(u32, bool)> {
    let mut samples = Vec::with_capacity(negatives + 1);
    samples.push((positive, true));
    for _ in 0..negatives {
        let n = table.sample(rng);
        if n != positive {
            samples.push((n, false));
        }
    }
    samples
}

/// Linear learning-rate decay from `initial` to `min_lr` over `total` steps.
pub fn lr_at(step: u64, total: u64, initial: f64, min_lr: f64) -> f64 {
    if total == 0 {
        return initial;
    }
    let f = step as f64 / total as f64;
    (initial - (initial - min_lr) * f).max(min_lr)
}
