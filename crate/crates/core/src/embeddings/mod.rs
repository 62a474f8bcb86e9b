//! Word, proper-name and document embeddings: skip-gram with negative
//! sampling over the combined IV+OOV term space, the PV-DBOW document
//! model, the AverageVec document representation, and cosine ranking.
//!
//! OOV proper names occur in the diachronic text, so they receive vectors
//! like any other term; ranking compares a document representation against
//! the OOV rows.

mod io;
mod pv;
mod sgns;
mod skipgram;

pub use io::{load_embeddings, save_embeddings};
pub use pv::{infer_doc_vector, train_pv_dbow};
pub use sgns::{sgns_loss_and_grads, UnigramTable};
pub use skipgram::train_skipgram;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::eval::RankedList;
use crate::matrix::{dot, norm, Mat};

/// Which index space a matrix's rows belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Iv,
    Oov,
    Doc,
    /// IV terms first, then OOV PNs; the training space.
    Combined,
}

/// A dense embedding table: one row of `dim` reals per index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMatrix {
    pub side: Side,
    mat: Mat,
}

impl EmbeddingMatrix {
    pub fn new(side: Side, mat: Mat) -> Result<Self> {
        if mat.cols() == 0 {
            return Err(Error::invalid("embedding dimension must be positive"));
        }
        if !mat.is_finite() {
            return Err(Error::invalid("embedding matrix contains non-finite entries"));
        }
        Ok(EmbeddingMatrix { side, mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.cols()
    }

    pub fn len(&self) -> usize {
        self.mat.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.mat.rows() == 0
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        self.mat.row(i)
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    /// Split a combined-space matrix into its IV and OOV halves.
    pub fn split_combined(&self, n_iv: usize) -> Result<(EmbeddingMatrix, EmbeddingMatrix)> {
        if self.side != Side::Combined {
            return Err(Error::invalid("split_combined: matrix is not combined-space"));
        }
        if n_iv > self.len() {
            return Err(Error::DimensionMismatch {
                expected: n_iv,
                got: self.len(),
            });
        }
        let dim = self.dim();
        let iv = Mat::from_fn(n_iv, dim, |r, c| self.mat.row(r)[c]);
        let oov = Mat::from_fn(self.len() - n_iv, dim, |r, c| self.mat.row(n_iv + r)[c]);
        Ok((
            EmbeddingMatrix { side: Side::Iv, mat: iv },
            EmbeddingMatrix { side: Side::Oov, mat: oov },
        ))
    }
}

/// Hyperparameters for skip-gram and PV-DBOW training. `window` only
/// applies to skip-gram; PV-DBOW predicts every document token from the
/// document vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipgramConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub min_lr: f64,
    pub seed: u64,
    /// 0 disables frequent-word subsampling.
    pub subsample_threshold: f64,
}

impl Default for SkipgramConfig {
    fn default() -> Self {
        SkipgramConfig {
            dim: 100,
            window: 15,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            min_lr: 1e-4,
            seed: 42,
            subsample_threshold: 0.0,
        }
    }
}

impl SkipgramConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::invalid("skipgram: dim must be positive"));
        }
        if self.window == 0 {
            return Err(Error::invalid("skipgram: window must be at least 1"));
        }
        if self.negatives == 0 {
            return Err(Error::invalid("skipgram: negatives must be at least 1"));
        }
        if !(self.initial_lr > self.min_lr && self.min_lr > 0.0) {
            return Err(Error::invalid(
                "skipgram: need initial_lr > min_lr > 0",
            ));
        }
        Ok(())
    }
}

/// Count-weighted mean of the IV embedding rows in the document:
/// (1/N_d) * sum over token occurrences of the term's vector.
pub fn average_vec(doc: &Document, iv_embeddings: &EmbeddingMatrix) -> Result<Vec<f64>> {
    if doc.iv_bag.is_empty() {
        return Err(Error::EmptyDocument(doc.id.clone()));
    }
    let mut h = vec![0.0; iv_embeddings.dim()];
    let mut n = 0u64;
    for &(term, count) in &doc.iv_bag {
        let v = iv_embeddings.vector(term as usize);
        for (hi, vi) in h.iter_mut().zip(v) {
            *hi += count as f64 * vi;
        }
        n += count as u64;
    }
    let inv = 1.0 / n as f64;
    for hi in h.iter_mut() {
        *hi *= inv;
    }
    Ok(h)
}

/// Score every OOV PN by cosine similarity against `h` and rank descending
/// (ties by ascending index). Zero-norm PN vectors score -1 and sort last.
pub fn cosine_rank(
    doc_id: &str,
    h: &[f64],
    oov_embeddings: &EmbeddingMatrix,
) -> Result<RankedList> {
    if h.len() != oov_embeddings.dim() {
        return Err(Error::DimensionMismatch {
            expected: oov_embeddings.dim(),
            got: h.len(),
        });
    }
    let h_norm = norm(h);
    if h_norm == 0.0 {
        return Err(Error::invalid(format!(
            "cosine_rank: zero-norm document vector for `{doc_id}`"
        )));
    }
    let scores: Vec<f64> = (0..oov_embeddings.len())
        .map(|i| {
            let v = oov_embeddings.vector(i);
            let v_norm = norm(v);
            if v_norm == 0.0 {
                -1.0
            } else {
                dot(h, v) / (h_norm * v_norm)
            }
        })
        .collect();
    Ok(RankedList::from_scores(doc_id, &scores))
}
