//! Corpus ingestion, IV/OOV partitioning, and synthetic-corpus tooling.
//!
//! A term is *in-vocabulary* (IV) when the recognizer lexicon contains it;
//! a proper name missing from the lexicon is an *out-of-vocabulary proper
//! name* (OOV PN) — the retrieval targets. Everything downstream works on
//! [`Document`]s encoded against a [`Vocabulary`] built from the training
//! split.

mod io;
mod noise;
mod stats;
mod synthetic;

pub use io::{load_corpus, load_lexicon, save_corpus, save_lexicon};
pub use noise::{inject_noise, mix_seed, NoiseStats};
pub use stats::{corpus_stats, StatsReport};
pub use synthetic::{generate_synthetic, SyntheticCorpus, SyntheticSpec};

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Corpus partition a document belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub fn name(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "validation" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(Error::invalid(format!("unknown split `{other}`"))),
        }
    }
}

/// The recognizer vocabulary: lower-cased terms with a proper-name marker.
/// Tokens absent from the lexicon and tagged as proper names are the OOV PNs.
#[derive(Debug, Clone)]
pub struct Lexicon {
    terms: HashMap<String, bool>,
}

impl Lexicon {
    /// Build from `(term, is_proper_name)` pairs. Terms are lower-cased;
    /// duplicates are merged (PN flag is OR-ed).
    pub fn new(entries: impl IntoIterator<Item = (String, bool)>) -> Result<Self> {
        let mut terms: HashMap<String, bool> = HashMap::new();
        for (term, pn) in entries {
            let term = term.to_lowercase();
            if term.is_empty() {
                return Err(Error::invalid("lexicon contains an empty term"));
            }
            *terms.entry(term).or_insert(false) |= pn;
        }
        if terms.is_empty() {
            return Err(Error::invalid("lexicon is empty"));
        }
        Ok(Lexicon { terms })
    }

    pub fn contains(&self, term: &str) -> bool {
        self.terms.contains_key(term)
    }

    pub fn is_pn(&self, term: &str) -> bool {
        self.terms.get(term).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in sorted order, for deterministic serialization.
    pub fn sorted_entries(&self) -> Vec<(&str, bool)> {
        let mut v: Vec<(&str, bool)> = self.terms.iter().map(|(t, &p)| (t.as_str(), p)).collect();
        v.sort_unstable();
        v
    }
}

/// A tokenized document before vocabulary encoding. `pn_tags[i]` marks
/// whether `tokens[i]` is a proper name (produced upstream or by the
/// synthetic generator).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub tokens: Vec<String>,
    pub pn_tags: Vec<bool>,
    pub split: Split,
}

impl RawDocument {
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::invalid("document with empty id"));
        }
        if self.tokens.is_empty() {
            return Err(Error::invalid(format!("document `{}` has no tokens", self.id)));
        }
        if self.tokens.len() != self.pn_tags.len() {
            return Err(Error::invalid(format!(
                "document `{}`: {} tokens but {} pn tags",
                self.id,
                self.tokens.len(),
                self.pn_tags.len()
            )));
        }
        Ok(())
    }
}

/// The IV/OOV partition of retained corpus terms. Indices are dense per
/// side; the *combined* space puts IV terms first, then OOV PNs, and is the
/// index space shared by skip-gram, PV-DBOW and LDA.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "VocabularyParts", into = "VocabularyParts")]
pub struct Vocabulary {
    iv_terms: Vec<String>,
    oov_pns: Vec<String>,
    iv_counts: Vec<u64>,
    oov_counts: Vec<u64>,
    iv_is_pn: Vec<bool>,
    iv_index: HashMap<String, u32>,
    oov_index: HashMap<String, u32>,
}

#[derive(Serialize, Deserialize, Clone)]
struct VocabularyParts {
    iv_terms: Vec<String>,
    oov_pns: Vec<String>,
    iv_counts: Vec<u64>,
    oov_counts: Vec<u64>,
    iv_is_pn: Vec<bool>,
}

impl From<Vocabulary> for VocabularyParts {
    fn from(v: Vocabulary) -> Self {
        VocabularyParts {
            iv_terms: v.iv_terms,
            oov_pns: v.oov_pns,
            iv_counts: v.iv_counts,
            oov_counts: v.oov_counts,
            iv_is_pn: v.iv_is_pn,
        }
    }
}

impl TryFrom<VocabularyParts> for Vocabulary {
    type Error = Error;

    fn try_from(p: VocabularyParts) -> Result<Self> {
        Vocabulary::from_parts(p.iv_terms, p.oov_pns, p.iv_counts, p.oov_counts, p.iv_is_pn)
    }
}

impl Vocabulary {
    pub fn from_parts(
        iv_terms: Vec<String>,
        oov_pns: Vec<String>,
        iv_counts: Vec<u64>,
        oov_counts: Vec<u64>,
        iv_is_pn: Vec<bool>,
    ) -> Result<Self> {
        if iv_counts.len() != iv_terms.len()
            || iv_is_pn.len() != iv_terms.len()
            || oov_counts.len() != oov_pns.len()
        {
            return Err(Error::invalid("vocabulary: mismatched column lengths"));
        }
        let mut iv_index = HashMap::with_capacity(iv_terms.len());
        for (i, t) in iv_terms.iter().enumerate() {
            if iv_index.insert(t.clone(), i as u32).is_some() {
                return Err(Error::invalid(format!("vocabulary: duplicate IV term `{t}`")));
            }
        }
        let mut oov_index = HashMap::with_capacity(oov_pns.len());
        for (i, t) in oov_pns.iter().enumerate() {
            if oov_index.insert(t.clone(), i as u32).is_some() {
                return Err(Error::invalid(format!("vocabulary: duplicate OOV PN `{t}`")));
            }
            if iv_index.contains_key(t) {
                return Err(Error::invalid(format!(
                    "vocabulary: `{t}` appears on both the IV and OOV sides"
                )));
            }
        }
        Ok(Vocabulary {
            iv_terms,
            oov_pns,
            iv_counts,
            oov_counts,
            iv_is_pn,
            iv_index,
            oov_index,
        })
    }

    pub fn n_iv(&self) -> usize {
        self.iv_terms.len()
    }

    pub fn n_oov(&self) -> usize {
        self.oov_pns.len()
    }

    pub fn n_combined(&self) -> usize {
        self.n_iv() + self.n_oov()
    }

    pub fn iv_terms(&self) -> &[String] {
        &self.iv_terms
    }

    pub fn oov_pns(&self) -> &[String] {
        &self.oov_pns
    }

    pub fn iv_counts(&self) -> &[u64] {
        &self.iv_counts
    }

    pub fn oov_counts(&self) -> &[u64] {
        &self.oov_counts
    }

    pub fn iv_term(&self, i: u32) -> &str {
        &self.iv_terms[i as usize]
    }

    pub fn oov_pn(&self, i: u32) -> &str {
        &self.oov_pns[i as usize]
    }

    pub fn iv_is_pn(&self, i: u32) -> bool {
        self.iv_is_pn[i as usize]
    }

    pub fn iv_index(&self, term: &str) -> Option<u32> {
        self.iv_index.get(term).copied()
    }

    pub fn oov_index(&self, term: &str) -> Option<u32> {
        self.oov_index.get(term).copied()
    }

    /// Index of a term in the combined IV-then-OOV space.
    pub fn combined_index(&self, term: &str) -> Option<usize> {
        self.iv_index(term)
            .map(|i| i as usize)
            .or_else(|| self.oov_index(term).map(|i| self.n_iv() + i as usize))
    }

    pub fn combined_term(&self, idx: usize) -> &str {
        if idx < self.n_iv() {
            &self.iv_terms[idx]
        } else {
            &self.oov_pns[idx - self.n_iv()]
        }
    }

    /// Occurrence counts over the combined space (training-split counts).
    pub fn combined_counts(&self) -> Vec<u64> {
        let mut c = Vec::with_capacity(self.n_combined());
        c.extend_from_slice(&self.iv_counts);
        c.extend_from_slice(&self.oov_counts);
        c
    }

    pub fn iv_hash(&self) -> String {
        hash_terms(&self.iv_terms)
    }

    pub fn oov_hash(&self) -> String {
        hash_terms(&self.oov_pns)
    }

    /// Hash of the full partition; model files store this to detect use
    /// against the wrong vocabulary.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.iv_hash().as_bytes());
        h.update(b"|");
        h.update(self.oov_hash().as_bytes());
        hex_digest(h)
    }
}

fn hash_terms(terms: &[String]) -> String {
    let mut h = Sha256::new();
    for t in terms {
        h.update(t.as_bytes());
        h.update(b"\n");
    }
    hex_digest(h)
}

fn hex_digest(h: Sha256) -> String {
    let d = h.finalize();
    d.iter().map(|b| format!("{b:02x}")).collect()
}

/// A vocabulary-encoded document: a bag of IV term occurrences plus the
/// OOV PN occurrences it co-occurs with. Bags are `(index, count)` pairs in
/// ascending index order. The targets of a document are the distinct OOV
/// PNs in `oov_bag`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub iv_bag: Vec<(u32, u32)>,
    pub oov_bag: Vec<(u32, u32)>,
    pub split: Split,
}

impl Document {
    /// N_d: total count of retained IV tokens.
    pub fn n_iv_tokens(&self) -> u64 {
        self.iv_bag.iter().map(|&(_, c)| c as u64).sum()
    }

    pub fn n_oov_tokens(&self) -> u64 {
        self.oov_bag.iter().map(|&(_, c)| c as u64).sum()
    }

    /// Distinct OOV PN indices present in the document.
    pub fn targets(&self) -> impl Iterator<Item = u32> + '_ {
        self.oov_bag.iter().map(|&(i, _)| i)
    }

    pub fn has_targets(&self) -> bool {
        !self.oov_bag.is_empty()
    }
}

/// Build the IV/OOV vocabulary from the training split.
///
/// A token is an OOV PN iff it is PN-tagged and absent from the lexicon;
/// lexicon terms are IV; anything else (unknown non-PNs, stoplist hits) is
/// dropped. Terms occurring fewer than `min_count` times in the training
/// split are removed. Order is descending count, ties by term.
pub fn build_vocabulary(
    docs: &[RawDocument],
    lexicon: &Lexicon,
    min_count: u32,
    stoplist: &HashSet<String>,
) -> Result<Vocabulary> {
    if min_count < 1 {
        return Err(Error::invalid("min_count must be at least 1"));
    }
    // (count, observed-pn-tag) per surface term, training split only.
    let mut iv_acc: BTreeMap<&str, (u64, bool)> = BTreeMap::new();
    let mut oov_acc: BTreeMap<&str, u64> = BTreeMap::new();
    for doc in docs.iter().filter(|d| d.split == Split::Train) {
        doc.validate()?;
        for (token, &pn) in doc.tokens.iter().zip(&doc.pn_tags) {
            if stoplist.contains(token.as_str()) {
                continue;
            }
            if lexicon.contains(token) {
                let e = iv_acc.entry(token).or_insert((0, false));
                e.0 += 1;
                e.1 |= pn;
            } else if pn {
                *oov_acc.entry(token).or_insert(0) += 1;
            }
            // Unknown non-PN tokens cannot be retrieval targets; dropped.
        }
    }

    let iv = sort_by_count(
        iv_acc
            .into_iter()
            .filter(|&(_, (c, _))| c >= min_count as u64),
    );
    let oov = sort_by_count(
        oov_acc
            .into_iter()
            .map(|(t, c)| (t, (c, true)))
            .filter(|&(_, (c, _))| c >= min_count as u64),
    );
    if oov.is_empty() {
        return Err(Error::EmptyOovVocabulary);
    }

    let iv_is_pn = iv
        .iter()
        .map(|&(t, (_, tagged))| tagged || lexicon.is_pn(t))
        .collect();
    Vocabulary::from_parts(
        iv.iter().map(|&(t, _)| t.to_string()).collect(),
        oov.iter().map(|&(t, _)| t.to_string()).collect(),
        iv.iter().map(|&(_, (c, _))| c).collect(),
        oov.iter().map(|&(_, (c, _))| c).collect(),
        iv_is_pn,
    )
}

fn sort_by_count<'a>(it: impl Iterator<Item = (&'a str, (u64, bool))>) -> Vec<(&'a str, (u64, bool))> {
    let mut v: Vec<_> = it.collect();
    v.sort_by(|a, b| b.1 .0.cmp(&a.1 .0).then_with(|| a.0.cmp(b.0)));
    v
}

/// Encode documents against the vocabulary and apply the document-length
/// filter: keep iff `min_terms <= N_d <= max_terms` over retained IV terms.
/// Targets come from the PN-tagged occurrences of OOV vocabulary terms; a
/// document whose targets all fell out of the vocabulary is kept with an
/// empty `oov_bag`.
pub fn filter_documents(
    docs: &[RawDocument],
    vocab: &Vocabulary,
    min_terms: u32,
    max_terms: u32,
) -> Vec<Document> {
    let mut out = Vec::new();
    for doc in docs {
        let mut iv: BTreeMap<u32, u32> = BTreeMap::new();
        let mut oov: BTreeMap<u32, u32> = BTreeMap::new();
        for (token, &pn) in doc.tokens.iter().zip(&doc.pn_tags) {
            if let Some(i) = vocab.iv_index(token) {
                *iv.entry(i).or_insert(0) += 1;
            } else if pn {
                if let Some(i) = vocab.oov_index(token) {
                    *oov.entry(i).or_insert(0) += 1;
                }
            }
        }
        let n_d: u64 = iv.values().map(|&c| c as u64).sum();
        if n_d == 0 || n_d < min_terms as u64 || n_d > max_terms as u64 {
            continue;
        }
        out.push(Document {
            id: doc.id.clone(),
            iv_bag: iv.into_iter().collect(),
            oov_bag: oov.into_iter().collect(),
            split: doc.split,
        });
    }
    out
}

/// Encode a document as an ordered sequence of combined-space indices,
/// dropping tokens outside the vocabulary. This is the skip-gram input.
pub fn encode_sequence(doc: &RawDocument, vocab: &Vocabulary) -> Vec<u32> {
    doc.tokens
        .iter()
        .zip(&doc.pn_tags)
        .filter_map(|(token, &pn)| {
            if let Some(i) = vocab.iv_index(token) {
                Some(i)
            } else if pn {
                vocab
                    .oov_index(token)
                    .map(|i| (vocab.n_iv() + i as usize) as u32)
            } else {
                None
            }
        })
        .collect()
}

/// Distinct OOV PN surface strings in a raw document (PN-tagged, absent
/// from the lexicon), independent of whether the vocabulary retained them.
/// This is what makes the retrievable-vs-total target ratio reportable.
pub fn oov_pn_strings<'a>(
    doc: &'a RawDocument,
    lexicon: &Lexicon,
) -> std::collections::BTreeSet<&'a str> {
    doc.tokens
        .iter()
        .zip(&doc.pn_tags)
        .filter(|(t, &pn)| pn && !lexicon.contains(t))
        .map(|(t, _)| t.as_str())
        .collect()
}
