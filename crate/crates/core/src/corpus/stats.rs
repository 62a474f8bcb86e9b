//! Corpus statistics in the layout of the broadcast-news dataset tables.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Document, Vocabulary};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsReport {
    pub documents: usize,
    /// Distinct retained terms (IV or OOV) occurring in these documents.
    pub unigram_vocabulary: usize,
    /// Total retained token occurrences (IV + OOV).
    pub total_tokens: u64,
    /// Distinct proper-name terms occurring (IV PNs plus OOV PNs).
    pub pn_unigrams: usize,
    pub oov_pn_unigrams: usize,
    pub docs_with_oov_pn: usize,
    pub oov_pn_occurrences: u64,
    /// Sum over documents of distinct targets, the per-document unique
    /// counting used for retrieval totals.
    pub unique_targets_total: u64,
}

impl StatsReport {
    pub fn to_text(&self) -> String {
        self.rows()
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// One metric per row: `name,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("name,value\n");
        for (k, v) in self.rows() {
            s.push_str(&format!("{k},{v}\n"));
        }
        s
    }

    fn rows(&self) -> Vec<(&'static str, u64)> {
        vec![
            ("documents", self.documents as u64),
            ("unigram_vocabulary", self.unigram_vocabulary as u64),
            ("total_tokens", self.total_tokens),
            ("pn_unigrams", self.pn_unigrams as u64),
            ("oov_pn_unigrams", self.oov_pn_unigrams as u64),
            ("docs_with_oov_pn", self.docs_with_oov_pn as u64),
            ("oov_pn_occurrences", self.oov_pn_occurrences),
            ("unique_targets_total", self.unique_targets_total),
        ]
    }
}

pub fn corpus_stats(docs: &[Document], vocab: &Vocabulary) -> StatsReport {
    let mut iv_seen: BTreeSet<u32> = BTreeSet::new();
    let mut oov_seen: BTreeSet<u32> = BTreeSet::new();
    let mut report = StatsReport {
        documents: docs.len(),
        ..StatsReport::default()
    };
    for doc in docs {
        for &(i, c) in &doc.iv_bag {
            iv_seen.insert(i);
            report.total_tokens += c as u64;
        }
        for &(i, c) in &doc.oov_bag {
            oov_seen.insert(i);
            report.total_tokens += c as u64;
            report.oov_pn_occurrences += c as u64;
        }
        if doc.has_targets() {
            report.docs_with_oov_pn += 1;
        }
        report.unique_targets_total += doc.oov_bag.len() as u64;
    }
    report.unigram_vocabulary = iv_seen.len() + oov_seen.len();
    report.oov_pn_unigrams = oov_seen.len();
    report.pn_unigrams =
        oov_seen.len() + iv_seen.iter().filter(|&&i| vocab.iv_is_pn(i)).count();
    report
}
