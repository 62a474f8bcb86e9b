//! Paragraph Vector, distributed-bag-of-words variant.
//!
//! Each document owns a vector that predicts the document's tokens through
//! a shared word output matrix over the combined IV+OOV space, so OOV PNs
//! end up with output vectors comparable to inferred document vectors.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::matrix::Mat;

use super::sgns::{draw_samples, lr_at, sgns_step, sgns_step_input_only, UnigramTable};
use super::{EmbeddingMatrix, Side, SkipgramConfig};

/// Token occurrences of a document in the combined index space, expanded by
/// count in ascending index order (IV first, then OOV).
fn occurrences(doc: &Document, n_iv: usize) -> Vec<u32> {
    let mut occ = Vec::with_capacity((doc.n_iv_tokens() + doc.n_oov_tokens()) as usize);
    for &(i, c) in &doc.iv_bag {
        for _ in 0..c {
            occ.push(i);
        }
    }
    for &(i, c) in &doc.oov_bag {
        for _ in 0..c {
            occ.push(n_iv as u32 + i);
        }
    }
    occ
}

/// Train PV-DBOW. `counts` is the combined-space occurrence table (also the
/// negative-sampling distribution). Returns (document vectors, word output
/// matrix); document vector row `d` corresponds to `docs[d]`.
pub fn train_pv_dbow(
    docs: &[Document],
    counts: &[u64],
    n_iv: usize,
    config: &SkipgramConfig,
) -> Result<(EmbeddingMatrix, EmbeddingMatrix)> {
    config.validate()?;
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if counts.len() < n_iv {
        return Err(Error::DimensionMismatch {
            expected: n_iv,
            got: counts.len(),
        });
    }
    let expanded: Vec<Vec<u32>> = docs.iter().map(|d| occurrences(d, n_iv)).collect();
    let total_tokens: u64 = expanded.iter().map(|o| o.len() as u64).sum();
    if total_tokens == 0 {
        return Err(Error::EmptyCorpus);
    }

    let dim = config.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let bound = 0.5 / dim as f64;
    let mut doc_vecs = Mat::zeros(docs.len(), dim);
    for r in 0..docs.len() {
        for x in doc_vecs.row_mut(r) {
            *x = rng.random_range(-bound..bound);
        }
    }
    let mut output = Mat::zeros(counts.len(), dim);
    let table = UnigramTable::from_counts(counts)?;

    let total_steps = config.epochs as u64 * total_tokens;
    let mut step = 0u64;
    for _epoch in 0..config.epochs {
        for (d, occ) in expanded.iter().enumerate() {
            for &token in occ {
                let lr = lr_at(step, total_steps, config.initial_lr, config.min_lr);
                step += 1;
                let samples = draw_samples(&table, token, config.negatives, &mut rng);
                sgns_step(&mut doc_vecs, &mut output, d, &samples, lr);
            }
        }
    }

    Ok((
        EmbeddingMatrix::new(Side::Doc, doc_vecs)?,
        EmbeddingMatrix::new(Side::Combined, output)?,
    ))
}

/// Infer a vector for an unseen document by gradient descent on a fresh
/// document vector with the word output matrix held fixed. `steps` counts
/// full passes over the document's IV token occurrences; `steps = 0`
/// returns the seeded initialization.
///
/// Only the IV bag drives inference: a recognizer hypothesis cannot contain
/// OOV tokens, and the OOV side of a test document is the ground truth the
/// ranking is judged against.
pub fn infer_doc_vector(
    doc: &Document,
    word_output: &EmbeddingMatrix,
    counts: &[u64],
    steps: usize,
    lr: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if word_output.side != Side::Combined {
        return Err(Error::invalid(
            "infer_doc_vector: output matrix must be combined-space",
        ));
    }
    if counts.len() != word_output.len() {
        return Err(Error::DimensionMismatch {
            expected: word_output.len(),
            got: counts.len(),
        });
    }
    let mut occ: Vec<u32> = Vec::with_capacity(doc.n_iv_tokens() as usize);
    for &(i, c) in &doc.iv_bag {
        for _ in 0..c {
            occ.push(i);
        }
    }
    if occ.is_empty() {
        return Err(Error::EmptyDocument(doc.id.clone()));
    }
    let dim = word_output.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = 0.5 / dim as f64;
    let mut h: Vec<f64> = (0..dim).map(|_| rng.random_range(-bound..bound)).collect();
    let table = UnigramTable::from_counts(counts)?;
    let negatives = 5;
    for _ in 0..steps {
        for &token in &occ {
            let samples = draw_samples(&table, token, negatives, &mut rng);
            sgns_step_input_only(&mut h, word_output.mat(), &samples, lr);
        }
    }
    Ok(h)
}
