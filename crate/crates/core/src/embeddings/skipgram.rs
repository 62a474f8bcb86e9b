//! Skip-gram training over ordered token sequences.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Mat;

use super::sgns::{draw_samples, lr_at, sgns_step, UnigramTable};
use super::{EmbeddingMatrix, Side, SkipgramConfig};

/// Train skip-gram embeddings with negative sampling over the combined
/// IV+OOV index space. `counts` gives the training-split occurrence count
/// per combined index (the negative-sampling distribution and the vector
/// row space). Returns (input, output) matrices.
///
/// The center token predicts every context token within `window`; the
/// learning rate decays linearly from `initial_lr` to `min_lr` over all
/// (epoch, token) steps. Single-threaded and bit-reproducible for a fixed
/// seed.
pub fn train_skipgram(
    sequences: &[Vec<u32>],
    counts: &[u64],
    config: &SkipgramConfig,
) -> Result<(EmbeddingMatrix, EmbeddingMatrix)> {
    config.validate()?;
    if counts.is_empty() {
        return Err(Error::invalid("train_skipgram: empty vocabulary"));
    }
    let total_tokens: u64 = sequences.iter().map(|s| s.len() as u64).sum();
    if total_tokens == 0 {
        return Err(Error::EmptyCorpus);
    }
    for seq in sequences {
        if let Some(&bad) = seq.iter().find(|&&t| t as usize >= counts.len()) {
            return Err(Error::invalid(format!(
                "train_skipgram: token index {bad} outside vocabulary of {}",
                counts.len()
            )));
        }
    }

    let n = counts.len();
    let dim = config.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let bound = 0.5 / dim as f64;
    let mut input = Mat::zeros(n, dim);
    for r in 0..n {
        for x in input.row_mut(r) {
            *x = rng.random_range(-bound..bound);
        }
    }
    let mut output = Mat::zeros(n, dim);

    let table = UnigramTable::from_counts(counts)?;
    let corpus_total: u64 = counts.iter().sum();
    let keep_prob = |term: u32| -> f64 {
        let t = config.subsample_threshold;
        if t <= 0.0 {
            return 1.0;
        }
        let f = counts[term as usize] as f64 / corpus_total as f64;
        if f <= 0.0 {
            return 1.0;
        }
        (((f / t).sqrt() + 1.0) * t / f).min(1.0)
    };

    let total_steps = config.epochs as u64 * total_tokens;
    let mut step = 0u64;
    for _epoch in 0..config.epochs {
        for seq in sequences {
            // Frequent-word subsampling thins the sequence for this epoch;
            // skipped tokens still advance the lr schedule.
            let kept: Vec<u32> = if config.subsample_threshold > 0.0 {
                seq.iter()
                    .copied()
                    .filter(|&t| rng.random::<f64>() < keep_prob(t))
                    .collect()
            } else {
                seq.clone()
            };
            let skipped = seq.len() - kept.len();
            for (i, &center) in kept.iter().enumerate() {
                let lr = lr_at(step, total_steps, config.initial_lr, config.min_lr);
                step += 1;
                let lo = i.saturating_sub(config.window);
                let hi = (i + config.window).min(kept.len() - 1);
                for j in lo..=hi {
                    if j == i {
                        continue;
                    }
                    let context = kept[j];
                    let samples = draw_samples(&table, context, config.negatives, &mut rng);
                    sgns_step(&mut input, &mut output, center as usize, &samples, lr);
                }
            }
            step += skipped as u64;
        }
    }

    Ok((
        EmbeddingMatrix::new(Side::Combined, input)?,
        EmbeddingMatrix::new(Side::Combined, output)?,
    ))
}
