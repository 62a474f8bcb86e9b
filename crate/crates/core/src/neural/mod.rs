//! Document-level bag-of-words context models over IV terms, trained to
//! give co-occurring OOV proper names the highest output probability.
//!
//! Three variants share one output layer (softmax over the OOV PN
//! vocabulary):
//!
//! - uniform bag: the context is the count-weighted mean of the input
//!   embeddings;
//! - anchor-weighted bag: a learned *context anchor* vector assigns each
//!   token occurrence an importance weight (softmax over the dot products
//!   of input embeddings with the anchor) and the context is the weighted
//!   sum — the model learns which words matter;
//! - concatenated: both context vectors side by side, which converges
//!   faster at the price of a doubled output layer.
//!
//! Training runs in two phases: first with the input embeddings frozen at
//! their pre-trained skip-gram values, then with everything unfrozen.

mod train;

pub use train::{
    loss_and_gradients, train_phase1, train_two_phase, validation_error, EvalRecord, Gradients,
    Phase, TrainConfig, TrainHistory,
};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::embeddings::{EmbeddingMatrix, Side};
use crate::error::{Error, Result};
use crate::eval::RankedList;
use crate::matrix::{axpy, dot, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Dcbow,
    Dcbow2,
    Dcbow2Plus,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Dcbow => "dcbow",
            Variant::Dcbow2 => "dcbow2",
            Variant::Dcbow2Plus => "dcbow2plus",
        }
    }

    pub fn has_anchor(&self) -> bool {
        !matches!(self, Variant::Dcbow)
    }

    /// Context dimensionality: K, or 2K for the concatenated variant.
    pub fn context_dim(&self, k: usize) -> usize {
        match self {
            Variant::Dcbow | Variant::Dcbow2 => k,
            Variant::Dcbow2Plus => 2 * k,
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dcbow" => Ok(Variant::Dcbow),
            "dcbow2" => Ok(Variant::Dcbow2),
            "dcbow2plus" => Ok(Variant::Dcbow2Plus),
            other => Err(Error::invalid(format!("unknown context model variant `{other}`"))),
        }
    }
}

/// Parameters of a document-level context model. `w_iv` holds the input
/// embeddings (one row per IV term), `w_oov`/`b_oov` the output layer over
/// OOV PNs, and `anchor` the importance vector for the weighted variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextModel {
    pub variant: Variant,
    pub k: usize,
    pub w_iv: Mat,
    pub w_oov: Mat,
    pub b_oov: Vec<f64>,
    pub anchor: Option<Vec<f64>>,
    pub iv_hash: String,
    pub oov_hash: String,
}

impl ContextModel {
    /// Fresh model around pre-trained input embeddings: output weights
    /// uniform in [-0.5/C, +0.5/C], zero bias, anchor ~ Normal(0, 0.01^2).
    pub fn init(
        variant: Variant,
        pretrained: &EmbeddingMatrix,
        n_oov: usize,
        iv_hash: impl Into<String>,
        oov_hash: impl Into<String>,
        seed: u64,
    ) -> Result<Self> {
        if pretrained.side != Side::Iv {
            return Err(Error::invalid("context model wants IV-side input embeddings"));
        }
        if n_oov == 0 {
            return Err(Error::EmptyOovVocabulary);
        }
        let k = pretrained.dim();
        let c = variant.context_dim(k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bound = 0.5 / c as f64;
        let mut w_oov = Mat::zeros(n_oov, c);
        for x in w_oov.data_mut() {
            *x = rng.random_range(-bound..bound);
        }
        let anchor = if variant.has_anchor() {
            let normal = Normal::new(0.0, 0.01).expect("valid normal");
            Some((0..k).map(|_| normal.sample(&mut rng)).collect())
        } else {
            None
        };
        let model = ContextModel {
            variant,
            k,
            w_iv: pretrained.mat().clone(),
            w_oov,
            b_oov: vec![0.0; n_oov],
            anchor,
            iv_hash: iv_hash.into(),
            oov_hash: oov_hash.into(),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn n_oov(&self) -> usize {
        self.w_oov.rows()
    }

    pub fn context_dim(&self) -> usize {
        self.variant.context_dim(self.k)
    }

    pub fn validate(&self) -> Result<()> {
        if self.w_iv.cols() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: self.w_iv.cols(),
            });
        }
        if self.w_oov.cols() != self.context_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.context_dim(),
                got: self.w_oov.cols(),
            });
        }
        if self.b_oov.len() != self.w_oov.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.w_oov.rows(),
                got: self.b_oov.len(),
            });
        }
        match (&self.anchor, self.variant.has_anchor()) {
            (Some(a), true) if a.len() != self.k => {
                return Err(Error::DimensionMismatch {
                    expected: self.k,
                    got: a.len(),
                })
            }
            (None, true) => return Err(Error::invalid("variant requires an anchor vector")),
            (Some(_), false) => {
                return Err(Error::invalid("uniform-bag variant carries no anchor"))
            }
            _ => {}
        }
        if !self.w_iv.is_finite()
            || !self.w_oov.is_finite()
            || self.b_oov.iter().any(|x| !x.is_finite())
            || self.anchor.iter().flatten().any(|x| !x.is_finite())
        {
            return Err(Error::invalid("context model contains non-finite parameters"));
        }
        Ok(())
    }

    /// Context vector for a document under this model's variant.
    pub fn context(&self, doc: &Document) -> Result<Vec<f64>> {
        match self.variant {
            Variant::Dcbow => context_dcbow(doc, &self.w_iv),
            Variant::Dcbow2 => context_dcbow2(doc, &self.w_iv, self.anchor.as_ref().unwrap()),
            Variant::Dcbow2Plus => context_plus(doc, &self.w_iv, self.anchor.as_ref().unwrap()),
        }
    }

    /// Softmax output over the OOV PN vocabulary, log-sum-exp stabilized.
    pub fn output_distribution(&self, context: &[f64]) -> Result<Vec<f64>> {
        if context.len() != self.context_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.context_dim(),
                got: context.len(),
            });
        }
        let mut logits: Vec<f64> = (0..self.n_oov())
            .map(|i| dot(self.w_oov.row(i), context) + self.b_oov[i])
            .collect();
        crate::matrix::softmax_in_place(&mut logits);
        Ok(logits)
    }

    /// Rank all OOV PNs for a document. A document with no encodable IV
    /// token cannot be scored and yields a flagged uniform ranking instead
    /// of an error, so evaluation sweeps never abort.
    pub fn rank_oov_pns(&self, doc: &Document) -> RankedList {
        if doc.iv_bag.is_empty() {
            let uniform = vec![1.0 / self.n_oov() as f64; self.n_oov()];
            let mut list = RankedList::from_scores(&doc.id, &uniform);
            list.mark_degenerate();
            return list;
        }
        let context = self.context(doc).expect("non-empty bag encodes");
        let probs = self.output_distribution(&context).expect("dims match");
        RankedList::from_scores(&doc.id, &probs)
    }

    /// Unique terms whose summed occurrence weight exceeds `threshold`
    /// (strictly), descending weight, ties by ascending term index. Only
    /// meaningful for the anchor-bearing variants.
    pub fn extract_keywords(&self, doc: &Document, threshold: f64) -> Result<Vec<(u32, f64)>> {
        let anchor = self
            .anchor
            .as_ref()
            .ok_or_else(|| Error::invalid("keyword extraction needs an importance layer"))?;
        let terms = term_importance(doc, &self.w_iv, anchor)?;
        let mut out: Vec<(u32, f64)> = terms
            .into_iter()
            .map(|(term, count, w)| (term, count as f64 * w))
            .filter(|&(_, w)| w > threshold)
            .collect();
        out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        Ok(out)
    }
}

/// Uniform bag context: count-weighted mean of input embedding rows,
/// c_d = (1/N_d) * sum over occurrences of w_j.
pub fn context_dcbow(doc: &Document, w_iv: &Mat) -> Result<Vec<f64>> {
    if doc.iv_bag.is_empty() {
        return Err(Error::EmptyDocument(doc.id.clone()));
    }
    let mut c = vec![0.0; w_iv.cols()];
    let mut n = 0u64;
    for &(term, count) in &doc.iv_bag {
        axpy(&mut c, count as f64, w_iv.row(term as usize));
        n += count as u64;
    }
    let inv = 1.0 / n as f64;
    for x in c.iter_mut() {
        *x *= inv;
    }
    Ok(c)
}

/// Per-term importance: (term, count, per-occurrence weight). All
/// occurrences of a term share one weight since their dot products with the
/// anchor are equal; the weights of all occurrences sum to 1.
pub(crate) fn term_importance(
    doc: &Document,
    w_iv: &Mat,
    anchor: &[f64],
) -> Result<Vec<(u32, u32, f64)>> {
    if doc.iv_bag.is_empty() {
        return Err(Error::EmptyDocument(doc.id.clone()));
    }
    let scores: Vec<f64> = doc
        .iv_bag
        .iter()
        .map(|&(term, _)| dot(w_iv.row(term as usize), anchor))
        .collect();
    let m = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut denom = 0.0;
    for (&(_, count), &s) in doc.iv_bag.iter().zip(&scores) {
        denom += count as f64 * (s - m).exp();
    }
    Ok(doc
        .iv_bag
        .iter()
        .zip(&scores)
        .map(|(&(term, count), &s)| (term, count, (s - m).exp() / denom))
        .collect())
}

/// Importance weights expanded to one entry per token occurrence, in
/// ascending term-index order (repeated terms contribute one entry per
/// count). Sums to 1.
pub fn importance_weights(doc: &Document, w_iv: &Mat, anchor: &[f64]) -> Result<Vec<f64>> {
    let terms = term_importance(doc, w_iv, anchor)?;
    let mut out = Vec::with_capacity(doc.n_iv_tokens() as usize);
    for (_, count, w) in terms {
        for _ in 0..count {
            out.push(w);
        }
    }
    Ok(out)
}

/// Anchor-weighted bag context: c_d = sum over occurrences of omega_j * w_j.
pub fn context_dcbow2(doc: &Document, w_iv: &Mat, anchor: &[f64]) -> Result<Vec<f64>> {
    let terms = term_importance(doc, w_iv, anchor)?;
    let mut c = vec![0.0; w_iv.cols()];
    for (term, count, w) in terms {
        axpy(&mut c, count as f64 * w, w_iv.row(term as usize));
    }
    Ok(c)
}

/// Concatenation [uniform bag ; weighted bag], in that fixed order.
pub fn context_plus(doc: &Document, w_iv: &Mat, anchor: &[f64]) -> Result<Vec<f64>> {
    let mut c = context_dcbow(doc, w_iv)?;
    c.extend(context_dcbow2(doc, w_iv, anchor)?);
    Ok(c)
}

#[cfg(test)]
mod tests;
