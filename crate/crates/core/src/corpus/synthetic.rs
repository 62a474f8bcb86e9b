//! Synthetic diachronic corpus generator.
//!
//! Desk-scale stand-in for real news corpora: each topic owns a pool of
//! OOV proper names and a pool of keywords; documents mix topic keywords
//! with shared filler vocabulary and mention a few of the topic's PNs.
//! Topic membership is recoverable from the keywords, so a context model
//! that works has measurable recall here.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::{Lexicon, RawDocument, Split};

/// Corpus filter bounds documents must survive (kept in sync with the
/// default document-length filter).
const FILTER_MIN_TERMS: usize = 20;
const FILTER_MAX_TERMS: usize = 500;

/// When a document draws a keyword token, it comes from its target PNs' own
/// keywords this often (uniformly from the whole topic pool otherwise).
/// This is what makes the *specific* names of a document inferable from its
/// words, the way real keywords cue real names.
const TARGET_KEYWORD_AFFINITY: f64 = 0.7;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_topics: usize,
    /// Training documents per topic. Validation and test each get a fifth
    /// of this (at least one).
    pub docs_per_topic: usize,
    pub pns_per_topic: usize,
    pub keywords_per_topic: usize,
    pub shared_vocab_size: usize,
    /// Inclusive range of IV tokens per document (PN mentions come on top).
    pub doc_length_range: (usize, usize),
    /// Per-token probability of drawing a topic keyword instead of filler.
    pub keyword_rate: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_topics: 10,
            docs_per_topic: 50,
            pns_per_topic: 5,
            keywords_per_topic: 10,
            shared_vocab_size: 500,
            doc_length_range: (30, 80),
            keyword_rate: 0.3,
            seed: 42,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_topics == 0
            || self.docs_per_topic == 0
            || self.pns_per_topic == 0
            || self.keywords_per_topic == 0
            || self.shared_vocab_size == 0
        {
            return Err(Error::invalid("synthetic spec: all sizes must be positive"));
        }
        let (lo, hi) = self.doc_length_range;
        if lo > hi {
            return Err(Error::invalid(format!(
                "synthetic spec: doc_length_range ({lo}, {hi}) is inverted"
            )));
        }
        if lo < FILTER_MIN_TERMS || hi > FILTER_MAX_TERMS {
            return Err(Error::invalid(format!(
                "synthetic spec: doc_length_range ({lo}, {hi}) outside corpus filter bounds [{FILTER_MIN_TERMS}, {FILTER_MAX_TERMS}]"
            )));
        }
        if !(self.keyword_rate > 0.0 && self.keyword_rate < 1.0) {
            return Err(Error::invalid(format!(
                "synthetic spec: keyword_rate must be in (0, 1), got {}",
                self.keyword_rate
            )));
        }
        Ok(())
    }

    fn docs_per_topic_for(&self, split: Split) -> usize {
        match split {
            Split::Train => self.docs_per_topic,
            Split::Validation | Split::Test => (self.docs_per_topic / 5).max(1),
        }
    }
}

/// The generated corpus plus the ground truth it was planted with.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub train: Vec<RawDocument>,
    pub validation: Vec<RawDocument>,
    pub test: Vec<RawDocument>,
    pub lexicon: Lexicon,
    /// Keyword surface strings per topic.
    pub topic_keywords: Vec<Vec<String>>,
    /// OOV PN surface strings per topic.
    pub topic_pns: Vec<Vec<String>>,
    /// `(doc id, topic)` for every generated document.
    pub doc_topics: Vec<(String, usize)>,
}

impl SyntheticCorpus {
    pub fn topic_of(&self, doc_id: &str) -> Option<usize> {
        self.doc_topics
            .iter()
            .find(|(id, _)| id == doc_id)
            .map(|&(_, t)| t)
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let filler: Vec<String> = (0..spec.shared_vocab_size)
        .map(|i| format!("w{i:04}"))
        .collect();
    let topic_keywords: Vec<Vec<String>> = (0..spec.n_topics)
        .map(|t| {
            (0..spec.keywords_per_topic)
                .map(|k| format!("kw{t:02}_{k:02}"))
                .collect()
        })
        .collect();
    let topic_pns: Vec<Vec<String>> = (0..spec.n_topics)
        .map(|t| {
            (0..spec.pns_per_topic)
                .map(|p| format!("pn{t:02}_{p:02}"))
                .collect()
        })
        .collect();

    let lexicon = Lexicon::new(
        filler
            .iter()
            .chain(topic_keywords.iter().flatten())
            .map(|t| (t.clone(), false)),
    )?;

    let mut corpus = SyntheticCorpus {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
        lexicon,
        topic_keywords,
        topic_pns,
        doc_topics: Vec::new(),
    };

    for split in [Split::Train, Split::Validation, Split::Test] {
        let per_topic = spec.docs_per_topic_for(split);
        for topic in 0..spec.n_topics {
            for d in 0..per_topic {
                let id = format!("{}_t{topic:02}_d{d:04}", split.name());
                let doc = generate_document(spec, &corpus, topic, id.clone(), split, &mut rng);
                corpus.doc_topics.push((id, topic));
                match split {
                    Split::Train => corpus.train.push(doc),
                    Split::Validation => corpus.validation.push(doc),
                    Split::Test => corpus.test.push(doc),
                }
            }
        }
    }

    plant_missing_pns(spec, &mut corpus, &mut rng);
    Ok(corpus)
}

/// Keywords owned by one PN of a topic: the pool is split round-robin, so
/// PN `p` owns keywords `p, p + P, p + 2P, ...` of its topic.
fn pn_keywords(keywords: &[String], pn: usize, pns_per_topic: usize) -> Vec<&String> {
    keywords
        .iter()
        .enumerate()
        .filter(|(k, _)| k % pns_per_topic == pn)
        .map(|(_, kw)| kw)
        .collect()
}

fn generate_document(
    spec: &SyntheticSpec,
    corpus: &SyntheticCorpus,
    topic: usize,
    id: String,
    split: Split,
    rng: &mut ChaCha8Rng,
) -> RawDocument {
    let filler_size = spec.shared_vocab_size;
    let keywords = &corpus.topic_keywords[topic];
    let pns = &corpus.topic_pns[topic];
    let (lo, hi) = spec.doc_length_range;

    // Targets first: 1..=3 distinct PNs of the topic. Their own keywords
    // dominate the document's keyword draws, so content predicts names.
    let n_targets = rng.random_range(1..=spec.pns_per_topic.min(3));
    let mut pool: Vec<usize> = (0..pns.len()).collect();
    pool.shuffle(rng);
    let targets = &pool[..n_targets];
    let target_keywords: Vec<&String> = targets
        .iter()
        .flat_map(|&pn| pn_keywords(keywords, pn, spec.pns_per_topic))
        .collect();

    let len = rng.random_range(lo..=hi);
    let mut tokens: Vec<String> = Vec::with_capacity(len + 6);
    let mut pn_tags: Vec<bool> = Vec::with_capacity(len + 6);
    for _ in 0..len {
        if rng.random::<f64>() < spec.keyword_rate {
            let kw = if !target_keywords.is_empty()
                && rng.random::<f64>() < TARGET_KEYWORD_AFFINITY
            {
                target_keywords[rng.random_range(0..target_keywords.len())]
            } else {
                &keywords[rng.random_range(0..keywords.len())]
            };
            tokens.push(kw.clone());
        } else {
            tokens.push(format!("w{:04}", rng.random_range(0..filler_size)));
        }
        pn_tags.push(false);
    }

    // Mention each target one to three times at random positions.
    for &pn_idx in targets {
        let mentions = rng.random_range(1..=3);
        for _ in 0..mentions {
            let pos = rng.random_range(0..=tokens.len());
            tokens.insert(pos, pns[pn_idx].clone());
            pn_tags.insert(pos, true);
        }
    }

    RawDocument {
        id,
        tokens,
        pn_tags,
        split,
    }
}

/// Guarantee every planted PN occurs in the training split, so corpus-level
/// PN counts match the construction exactly.
fn plant_missing_pns(spec: &SyntheticSpec, corpus: &mut SyntheticCorpus, rng: &mut ChaCha8Rng) {
    use std::collections::HashSet;
    let mentioned: HashSet<&str> = corpus
        .train
        .iter()
        .flat_map(|d| {
            d.tokens
                .iter()
                .zip(&d.pn_tags)
                .filter(|(_, &pn)| pn)
                .map(|(t, _)| t.as_str())
        })
        .collect();
    let mut missing: Vec<(usize, String)> = Vec::new();
    for (topic, pns) in corpus.topic_pns.iter().enumerate() {
        for pn in pns {
            if !mentioned.contains(pn.as_str()) {
                missing.push((topic, pn.clone()));
            }
        }
    }
    let per_topic_train = spec.docs_per_topic_for(Split::Train);
    for (topic, pn) in missing {
        let doc_idx = topic * per_topic_train + rng.random_range(0..per_topic_train);
        let doc = &mut corpus.train[doc_idx];
        let pos = rng.random_range(0..=doc.tokens.len());
        doc.tokens.insert(pos, pn);
        doc.pn_tags.insert(pos, true);
    }
}
