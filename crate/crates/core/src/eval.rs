//! Retrieval evaluation: Recall@N and MAP@N sweeps over ranked lists.
//!
//! Recall is micro-averaged over target instances; MAP is macro-averaged
//! over documents. Targets absent from the training OOV vocabulary are
//! unreachable by any ranker: they count into `n_targets_total` but not
//! into the metric denominators, so the retrievable-coverage ratio stays
//! visible in every report.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Flag set on rankings produced from documents with no encodable tokens.
pub const FLAG_DEGENERATE: &str = "degenerate-input";

/// A per-document scored ordering over the OOV PN vocabulary, scores
/// non-increasing, ties broken by ascending index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub doc_id: String,
    pub entries: Vec<(u32, f64)>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub flags: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated_to: Option<usize>,
}

impl RankedList {
    /// Sort dense per-index scores into a ranked list.
    pub fn from_scores(doc_id: impl Into<String>, scores: &[f64]) -> Self {
        let mut entries: Vec<(u32, f64)> = scores
            .iter()
            .enumerate()
            .map(|(i, &s)| (i as u32, s))
            .collect();
        entries.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        RankedList {
            doc_id: doc_id.into(),
            entries,
            flags: BTreeSet::new(),
            truncated_to: None,
        }
    }

    pub fn mark_degenerate(&mut self) {
        self.flags.insert(FLAG_DEGENERATE.to_string());
    }

    pub fn is_degenerate(&self) -> bool {
        self.flags.contains(FLAG_DEGENERATE)
    }

    /// 1-based rank of an OOV PN index, if listed.
    pub fn rank_of(&self, index: u32) -> Option<usize> {
        self.entries.iter().position(|&(i, _)| i == index).map(|p| p + 1)
    }

    pub fn truncate(&mut self, n: usize) {
        if n < self.entries.len() {
            self.entries.truncate(n);
            self.truncated_to = Some(n);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for w in self.entries.windows(2) {
            if w[0].1 < w[1].1 {
                return Err(Error::invalid(format!(
                    "ranked list `{}`: scores increase at index {}",
                    self.doc_id, w[1].0
                )));
            }
        }
        for &(i, _) in &self.entries {
            if !seen.insert(i) {
                return Err(Error::invalid(format!(
                    "ranked list `{}`: index {i} appears twice",
                    self.doc_id
                )));
            }
        }
        Ok(())
    }
}

/// Ground-truth targets for one document. `total_unique` includes targets
/// that fell outside the training OOV vocabulary and can never be retrieved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocTargets {
    pub retrievable: BTreeSet<u32>,
    pub total_unique: usize,
}

impl DocTargets {
    pub fn new(retrievable: BTreeSet<u32>, total_unique: usize) -> Self {
        debug_assert!(total_unique >= retrievable.len());
        DocTargets {
            retrievable,
            total_unique,
        }
    }

    pub fn retrievable_only(retrievable: BTreeSet<u32>) -> Self {
        let total = retrievable.len();
        DocTargets {
            retrievable,
            total_unique: total,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub cutoffs: Vec<usize>,
    pub recall_at: Vec<f64>,
    pub map_at: Vec<f64>,
    /// Documents included in the metrics (>= 1 retrievable target).
    pub n_docs: usize,
    pub n_targets_total: usize,
    pub n_targets_retrievable: usize,
    pub n_degenerate: usize,
}

impl EvalReport {
    /// `method,cutoff,recall,map` rows after a `#` header block with the
    /// document/target totals and averaging conventions.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# method={}\n", self.method));
        s.push_str(&format!(
            "# n_docs={} n_targets_total={} n_targets_retrievable={} n_degenerate={}\n",
            self.n_docs, self.n_targets_total, self.n_targets_retrievable, self.n_degenerate
        ));
        s.push_str("# recall=micro-averaged-over-targets map=macro-averaged-over-documents\n");
        s.push_str("method,cutoff,recall,map\n");
        for ((&n, &r), &m) in self.cutoffs.iter().zip(&self.recall_at).zip(&self.map_at) {
            s.push_str(&format!("{},{},{},{}\n", self.method, n, r, m));
        }
        s
    }
}

fn included_docs<'a>(
    lists: &'a [RankedList],
    targets: &'a [DocTargets],
) -> Result<Vec<(&'a RankedList, &'a DocTargets)>> {
    if lists.len() != targets.len() {
        return Err(Error::invalid(format!(
            "{} ranked lists for {} target sets",
            lists.len(),
            targets.len()
        )));
    }
    let docs: Vec<_> = lists
        .iter()
        .zip(targets)
        .filter(|(_, t)| !t.retrievable.is_empty())
        .collect();
    if docs.is_empty() {
        return Err(Error::invalid(
            "no document has retrievable targets; nothing to evaluate",
        ));
    }
    Ok(docs)
}

/// Micro-averaged Recall@N for each cutoff:
/// sum over docs of |targets in top N| / sum over docs of |retrievable|.
pub fn recall_at_n(
    lists: &[RankedList],
    targets: &[DocTargets],
    cutoffs: &[usize],
) -> Result<Vec<f64>> {
    let docs = included_docs(lists, targets)?;
    let denom: usize = docs.iter().map(|(_, t)| t.retrievable.len()).sum();
    let mut out = Vec::with_capacity(cutoffs.len());
    for &n in cutoffs {
        let hits: usize = docs
            .iter()
            .map(|(list, t)| {
                list.entries
                    .iter()
                    .take(n)
                    .filter(|(i, _)| t.retrievable.contains(i))
                    .count()
            })
            .sum();
        out.push(hits as f64 / denom as f64);
    }
    Ok(out)
}

/// Macro-averaged MAP@N. Per document,
/// AP@N = (sum of Precision@k at relevant ranks k <= N) / min(|targets|, N),
/// so a perfect ranking reaches 1 at every cutoff.
pub fn mean_average_precision(
    lists: &[RankedList],
    targets: &[DocTargets],
    cutoffs: &[usize],
) -> Result<Vec<f64>> {
    let docs = included_docs(lists, targets)?;
    let mut out = Vec::with_capacity(cutoffs.len());
    for &n in cutoffs {
        let mut sum = 0.0;
        for (list, t) in &docs {
            let mut hits = 0usize;
            let mut ap = 0.0;
            for (k, (i, _)) in list.entries.iter().take(n).enumerate() {
                if t.retrievable.contains(i) {
                    hits += 1;
                    ap += hits as f64 / (k + 1) as f64;
                }
            }
            sum += ap / t.retrievable.len().min(n) as f64;
        }
        out.push(sum / docs.len() as f64);
    }
    Ok(out)
}

/// Run both metric sweeps and collect the totals into a report.
pub fn evaluate(
    method: impl Into<String>,
    lists: &[RankedList],
    targets: &[DocTargets],
    cutoffs: &[usize],
) -> Result<EvalReport> {
    let recall_at = recall_at_n(lists, targets, cutoffs)?;
    let map_at = mean_average_precision(lists, targets, cutoffs)?;
    let docs = included_docs(lists, targets)?;
    Ok(EvalReport {
        method: method.into(),
        cutoffs: cutoffs.to_vec(),
        recall_at,
        map_at,
        n_docs: docs.len(),
        n_targets_total: targets.iter().map(|t| t.total_unique).sum(),
        n_targets_retrievable: targets.iter().map(|t| t.retrievable.len()).sum(),
        n_degenerate: docs.iter().filter(|(l, _)| l.is_degenerate()).count(),
    })
}

/// Precision, recall and F1 from confusion counts. Zero denominators give
/// zero by convention.
pub fn prf1(tp: u64, fp: u64, fn_: u64) -> (f64, f64, f64) {
    let precision = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = if tp + fn_ == 0 {
        0.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    let f1 = if 2 * tp + fp + fn_ == 0 {
        0.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
    };
    (precision, recall, f1)
}

/// Element-wise `b - a` for recall and MAP, for comparing two training
/// stages or transcription conditions over the same documents.
pub fn report_diff(a: &EvalReport, b: &EvalReport) -> Result<EvalReport> {
    if a.cutoffs != b.cutoffs {
        return Err(Error::invalid("report_diff: cutoff lists differ"));
    }
    if a.n_docs != b.n_docs
        || a.n_targets_total != b.n_targets_total
        || a.n_targets_retrievable != b.n_targets_retrievable
    {
        return Err(Error::invalid("report_diff: document sets differ"));
    }
    Ok(EvalReport {
        method: "B-minus-A".to_string(),
        cutoffs: a.cutoffs.clone(),
        recall_at: b.recall_at.iter().zip(&a.recall_at).map(|(x, y)| x - y).collect(),
        map_at: b.map_at.iter().zip(&a.map_at).map(|(x, y)| x - y).collect(),
        n_docs: a.n_docs,
        n_targets_total: a.n_targets_total,
        n_targets_retrievable: a.n_targets_retrievable,
        n_degenerate: b.n_degenerate,
    })
}

/// Default cutoff sweep: powers of two, capped at (and including) the OOV
/// vocabulary size.
pub fn default_cutoffs(n_oov: usize) -> Vec<usize> {
    let mut cutoffs = Vec::new();
    let mut n = 1usize;
    while n < n_oov {
        cutoffs.push(n);
        n *= 2;
    }
    if n_oov > 0 {
        cutoffs.push(n_oov);
    }
    cutoffs
}
