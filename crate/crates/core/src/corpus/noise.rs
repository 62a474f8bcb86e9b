//! Transcription-noise simulation.
//!
//! Stands in for a real recognizer: at a given word error rate, each IV
//! token occurrence is independently deleted or replaced by a random IV
//! term. Targets are never touched — they describe what was *said*, not
//! what was recognized.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::error::{Error, Result};

use super::{Document, Vocabulary};

/// What the corruption pass did to a document.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NoiseStats {
    pub kept: u64,
    pub deleted: u64,
    pub substituted: u64,
    /// Set when every occurrence was deleted and one original token was
    /// put back to keep the document non-empty.
    pub rescued: bool,
}

impl NoiseStats {
    pub fn corrupted(&self) -> u64 {
        self.deleted + self.substituted
    }
}

/// Corrupt a document's IV bag at `error_rate`. Each occurrence is hit with
/// probability `error_rate`; a hit is a deletion or a uniform-random IV
/// substitution with equal chance. Deterministic for a fixed seed.
pub fn inject_noise(
    doc: &Document,
    error_rate: f64,
    vocab: &Vocabulary,
    seed: u64,
) -> Result<(Document, NoiseStats)> {
    if !(0.0..1.0).contains(&error_rate) {
        return Err(Error::invalid(format!(
            "error_rate must be in [0, 1), got {error_rate}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = NoiseStats::default();
    let mut bag: BTreeMap<u32, u32> = BTreeMap::new();
    // Occurrence expansion in ascending index order keeps the draw sequence
    // reproducible.
    for &(term, count) in &doc.iv_bag {
        for _ in 0..count {
            if rng.random::<f64>() < error_rate {
                if rng.random::<f64>() < 0.5 {
                    stats.deleted += 1;
                } else {
                    stats.substituted += 1;
                    let sub = rng.random_range(0..vocab.n_iv() as u32);
                    *bag.entry(sub).or_insert(0) += 1;
                }
            } else {
                stats.kept += 1;
                *bag.entry(term).or_insert(0) += 1;
            }
        }
    }
    if bag.is_empty() && doc.n_iv_tokens() > 0 {
        // Everything got deleted; keep one original occurrence so the
        // document stays usable downstream.
        let pick = rng.random_range(0..doc.n_iv_tokens());
        let mut acc = 0;
        for &(term, count) in &doc.iv_bag {
            acc += count as u64;
            if pick < acc {
                bag.insert(term, 1);
                break;
            }
        }
        stats.rescued = true;
        log::warn!(
            "inject_noise: document `{}` lost every token at rate {error_rate}; retained one original occurrence",
            doc.id
        );
    }
    let noisy = Document {
        id: doc.id.clone(),
        iv_bag: bag.into_iter().collect(),
        oov_bag: doc.oov_bag.clone(),
        split: doc.split,
    };
    Ok((noisy, stats))
}

/// Derive a per-item seed from a base seed (splitmix64 over base XOR salt).
/// Used to give each document its own noise/inference stream while keeping
/// whole runs reproducible.
pub fn mix_seed(base: u64, salt: u64) -> u64 {
    let mut z = base ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
