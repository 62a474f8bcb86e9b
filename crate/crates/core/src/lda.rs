//! LDA baseline: collapsed Gibbs sampling over the combined vocabulary,
//! held-out topic inference, and OOV PN scoring.
//!
//! The topic space is learned on the diachronic training documents
//! (IV terms *and* OOV PN occurrences, so every PN has a row in the
//! term-topic table). A test document's posterior p(t|h) is inferred with
//! the term-topic table held fixed; an OOV PN is then scored by
//! sum over topics of p(pn|t) * p(t|h).

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, Vocabulary};
use crate::error::{Error, Result};
use crate::eval::RankedList;
use crate::matrix::Mat;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub topics: usize,
    /// Document-topic Dirichlet prior; `None` defaults to 50/T.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    /// Sweeps between post-burn-in estimate samples.
    pub thin: usize,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        LdaConfig {
            topics: 100,
            alpha: None,
            beta: 0.01,
            iterations: 300,
            burn_in: 150,
            thin: 10,
            seed: 42,
        }
    }
}

impl LdaConfig {
    pub fn alpha_value(&self) -> f64 {
        self.alpha.unwrap_or(50.0 / self.topics as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.topics == 0 {
            return Err(Error::invalid("lda: need at least one topic"));
        }
        if self.iterations <= self.burn_in {
            return Err(Error::invalid("lda: iterations must exceed burn_in"));
        }
        if !(self.alpha_value() > 0.0 && self.beta > 0.0) {
            return Err(Error::invalid("lda: priors must be positive"));
        }
        if self.thin == 0 {
            return Err(Error::invalid("lda: thin must be at least 1"));
        }
        Ok(())
    }
}

/// Trained topic model. `phi` is vocabulary x topics with columns on the
/// probability simplex; `theta` is documents x topics with rows on the
/// simplex. Estimates are averages of smoothed count ratios over
/// post-burn-in samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicModel {
    pub n_topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub vocab_size: usize,
    pub vocab_hash: String,
    pub phi: Mat,
    pub theta: Mat,
    /// Final token-topic assignment per training document, diagnostics only.
    pub assignments: Vec<Vec<u32>>,
}

/// Topic mixture of a held-out document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicPosterior(pub Vec<f64>);

/// Combined-space token occurrences of a document. `iv_only` restricts to
/// the IV bag (the hypothesis side; OOV occurrences of a test document are
/// the ground truth, not input).
fn expand_tokens(doc: &Document, n_iv: usize, iv_only: bool) -> Vec<u32> {
    let mut out = Vec::new();
    for &(i, c) in &doc.iv_bag {
        for _ in 0..c {
            out.push(i);
        }
    }
    if !iv_only {
        for &(i, c) in &doc.oov_bag {
            for _ in 0..c {
                out.push(n_iv as u32 + i);
            }
        }
    }
    out
}

fn sample_discrete(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let x = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (k, &w) in weights.iter().enumerate() {
        acc += w;
        if x < acc {
            return k;
        }
    }
    weights.len() - 1
}

/// Collapsed Gibbs training. Deterministic for a fixed seed.
pub fn train_lda_gibbs(
    docs: &[Document],
    vocab: &Vocabulary,
    config: &LdaConfig,
) -> Result<TopicModel> {
    config.validate()?;
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let t = config.topics;
    let v = vocab.n_combined();
    let alpha = config.alpha_value();
    let beta = config.beta;
    let n_iv = vocab.n_iv();

    let tokens: Vec<Vec<u32>> = docs.iter().map(|d| expand_tokens(d, n_iv, false)).collect();
    if tokens.iter().all(|tk| tk.is_empty()) {
        return Err(Error::EmptyCorpus);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut z: Vec<Vec<u32>> = tokens
        .iter()
        .map(|tk| tk.iter().map(|_| rng.random_range(0..t as u32)).collect())
        .collect();

    // Count tables: doc-topic, term-topic, topic totals.
    let mut n_dt = Mat::zeros(docs.len(), t);
    let mut n_vt = Mat::zeros(v, t);
    let mut n_t = vec![0.0f64; t];
    for (d, tk) in tokens.iter().enumerate() {
        for (i, &term) in tk.iter().enumerate() {
            let k = z[d][i] as usize;
            n_dt.row_mut(d)[k] += 1.0;
            n_vt.row_mut(term as usize)[k] += 1.0;
            n_t[k] += 1.0;
        }
    }

    let mut phi_acc = Mat::zeros(v, t);
    let mut theta_acc = Mat::zeros(docs.len(), t);
    let mut n_samples = 0usize;
    let mut weights = vec![0.0f64; t];

    for sweep in 1..=config.iterations {
        for (d, tk) in tokens.iter().enumerate() {
            for (i, &term) in tk.iter().enumerate() {
                let old = z[d][i] as usize;
                n_dt.row_mut(d)[old] -= 1.0;
                n_vt.row_mut(term as usize)[old] -= 1.0;
                n_t[old] -= 1.0;

                let dt = n_dt.row(d);
                let vt = n_vt.row(term as usize);
                for k in 0..t {
                    weights[k] =
                        (dt[k] + alpha) * (vt[k] + beta) / (n_t[k] + v as f64 * beta);
                }
                let new = sample_discrete(&weights, &mut rng);
                z[d][i] = new as u32;
                n_dt.row_mut(d)[new] += 1.0;
                n_vt.row_mut(term as usize)[new] += 1.0;
                n_t[new] += 1.0;
            }
        }

        let past_burn_in = sweep > config.burn_in;
        let scheduled = past_burn_in && (sweep - config.burn_in) % config.thin == 0;
        let last_chance = sweep == config.iterations && n_samples == 0;
        if scheduled || last_chance {
            n_samples += 1;
            for term in 0..v {
                let vt = n_vt.row(term);
                let acc = phi_acc.row_mut(term);
                for k in 0..t {
                    acc[k] += (vt[k] + beta) / (n_t[k] + v as f64 * beta);
                }
            }
            for (d, tk) in tokens.iter().enumerate() {
                let dt = n_dt.row(d);
                let acc = theta_acc.row_mut(d);
                let n_d = tk.len() as f64;
                for k in 0..t {
                    acc[k] += (dt[k] + alpha) / (n_d + t as f64 * alpha);
                }
            }
        }
    }

    let inv = 1.0 / n_samples as f64;
    for x in phi_acc.data_mut() {
        *x *= inv;
    }
    for x in theta_acc.data_mut() {
        *x *= inv;
    }

    Ok(TopicModel {
        n_topics: t,
        alpha,
        beta,
        vocab_size: v,
        vocab_hash: vocab.content_hash(),
        phi: phi_acc,
        theta: theta_acc,
        assignments: z,
    })
}

/// Gibbs inference of p(t|h) for a held-out document with the term-topic
/// table held fixed. Only the IV bag is used; terms outside the model
/// vocabulary were already dropped at encode time.
pub fn infer_topics(
    doc: &Document,
    model: &TopicModel,
    iterations: usize,
    burn_in: usize,
    seed: u64,
) -> Result<TopicPosterior> {
    if iterations <= burn_in {
        return Err(Error::invalid("lda inference: iterations must exceed burn_in"));
    }
    let t = model.n_topics;
    // Vocabulary split is implicit: IV indices address phi rows directly.
    let tokens = expand_tokens(doc, model.vocab_size, true);
    if tokens.is_empty() {
        return Err(Error::EmptyDocument(doc.id.clone()));
    }
    if let Some(&bad) = tokens.iter().find(|&&tk| (tk as usize) >= model.vocab_size) {
        return Err(Error::invalid(format!(
            "lda inference: token index {bad} outside model vocabulary"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z: Vec<usize> = tokens
        .iter()
        .map(|_| rng.random_range(0..t))
        .collect();
    let mut n_ht = vec![0.0f64; t];
    for &k in &z {
        n_ht[k] += 1.0;
    }

    let thin = 10usize;
    let mut acc = vec![0.0f64; t];
    let mut n_samples = 0usize;
    let mut weights = vec![0.0f64; t];
    let n_h = tokens.len() as f64;

    for sweep in 1..=iterations {
        for (i, &term) in tokens.iter().enumerate() {
            let old = z[i];
            n_ht[old] -= 1.0;
            let phi_row = model.phi.row(term as usize);
            for k in 0..t {
                weights[k] = phi_row[k] * (n_ht[k] + model.alpha);
            }
            let new = sample_discrete(&weights, &mut rng);
            z[i] = new;
            n_ht[new] += 1.0;
        }
        let past_burn_in = sweep > burn_in;
        let scheduled = past_burn_in && (sweep - burn_in) % thin == 0;
        let last_chance = sweep == iterations && n_samples == 0;
        if scheduled || last_chance {
            n_samples += 1;
            for k in 0..t {
                acc[k] += (n_ht[k] + model.alpha) / (n_h + t as f64 * model.alpha);
            }
        }
    }

    let inv = 1.0 / n_samples as f64;
    for x in acc.iter_mut() {
        *x *= inv;
    }
    Ok(TopicPosterior(acc))
}

/// Score OOV PNs: score(pn) = sum over topics of phi[pn, t] * p(t|h).
/// `oov_offset` is the combined-space index of OOV PN 0 (i.e. the IV
/// vocabulary size); `n_oov` the number of PNs. Descending order, ties by
/// ascending PN index.
pub fn score_oov_pns(
    doc_id: &str,
    posterior: &TopicPosterior,
    model: &TopicModel,
    oov_offset: usize,
    n_oov: usize,
) -> Result<RankedList> {
    if posterior.0.len() != model.n_topics {
        return Err(Error::DimensionMismatch {
            expected: model.n_topics,
            got: posterior.0.len(),
        });
    }
    if n_oov == 0 {
        return Err(Error::EmptyOovVocabulary);
    }
    if oov_offset + n_oov > model.vocab_size {
        return Err(Error::DimensionMismatch {
            expected: model.vocab_size,
            got: oov_offset + n_oov,
        });
    }
    let scores: Vec<f64> = (0..n_oov)
        .map(|i| term_score(posterior, model, oov_offset + i))
        .collect();
    Ok(RankedList::from_scores(doc_id, &scores))
}

/// Likelihood of a single combined-space term under the posterior.
pub fn term_score(posterior: &TopicPosterior, model: &TopicModel, term: usize) -> f64 {
    let phi_row = model.phi.row(term);
    phi_row
        .iter()
        .zip(&posterior.0)
        .map(|(&p_vt, &p_th)| p_vt * p_th)
        .sum()
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use crate::corpus::{build_vocabulary, filter_documents, Lexicon, RawDocument, Split};

    use super::*;

    /// Two disjoint-vocabulary document groups: group A uses terms a00..a24,
    /// group B uses b00..b24; PNs pa / pb respectively.
    fn two_group_corpus() -> (Vec<Document>, Vocabulary) {
        let mut raws = Vec::new();
        for g in 0..2 {
            for d in 0..12 {
                let prefix = if g == 0 { "a" } else { "b" };
                let mut tokens: Vec<(String, bool)> = (0..25)
                    .map(|i| (format!("{prefix}{:02}", (i * 7 + d) % 25), false))
                    .collect();
                tokens.push((format!("p{prefix}"), true));
                raws.push(RawDocument {
                    id: format!("{prefix}{d}"),
                    tokens: tokens.iter().map(|(t, _)| t.clone()).collect(),
                    pn_tags: tokens.iter().map(|&(_, pn)| pn).collect(),
                    split: if d < 10 { Split::Train } else { Split::Test },
                });
            }
        }
        let lexicon = Lexicon::new(
            (0..25)
                .flat_map(|i| vec![format!("a{i:02}"), format!("b{i:02}")])
                .map(|t| (t, false)),
        )
        .unwrap();
        let vocab = build_vocabulary(&raws, &lexicon, 1, &HashSet::new()).unwrap();
        let docs = filter_documents(&raws, &vocab, 20, 500);
        (docs, vocab)
    }

    fn train_docs(docs: &[Document]) -> Vec<Document> {
        docs.iter()
            .filter(|d| d.split == Split::Train)
            .cloned()
            .collect()
    }

    #[test]
    fn single_topic_model_is_smoothed_unigram() {
        let (docs, vocab) = two_group_corpus();
        let train = train_docs(&docs);
        let config = LdaConfig {
            topics: 1,
            iterations: 20,
            burn_in: 10,
            thin: 5,
            ..LdaConfig::default()
        };
        let model = train_lda_gibbs(&train, &vocab, &config).unwrap();
        // theta: every document fully on the single topic.
        for d in 0..train.len() {
            assert!((model.theta.row(d)[0] - 1.0).abs() < 1e-9);
        }
        // phi column = smoothed corpus unigram distribution.
        let v = vocab.n_combined();
        let mut counts = vec![0.0f64; v];
        let mut total = 0.0;
        for doc in &train {
            for &(i, c) in &doc.iv_bag {
                counts[i as usize] += c as f64;
                total += c as f64;
            }
            for &(i, c) in &doc.oov_bag {
                counts[vocab.n_iv() + i as usize] += c as f64;
                total += c as f64;
            }
        }
        for term in 0..v {
            let expect = (counts[term] + config.beta) / (total + v as f64 * config.beta);
            assert!((model.phi.row(term)[0] - expect).abs() < 1e-9, "term {term}");
        }
        // Inference on a single-topic model is the trivial posterior.
        let post = infer_topics(&train[0], &model, 20, 5, 9).unwrap();
        assert!((post.0[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_topics_separate_disjoint_groups() {
        let (docs, vocab) = two_group_corpus();
        let train = train_docs(&docs);
        // The 50/T default prior would swamp 26-token documents; tiny
        // corpora need a weakly informative alpha.
        let config = LdaConfig {
            topics: 2,
            alpha: Some(0.1),
            iterations: 200,
            burn_in: 100,
            thin: 10,
            seed: 7,
            ..LdaConfig::default()
        };
        let model = train_lda_gibbs(&train, &vocab, &config).unwrap();
        for (d, doc) in train.iter().enumerate() {
            let row = model.theta.row(d);
            let dominant = row.iter().cloned().fold(f64::MIN, f64::max);
            assert!(
                dominant >= 0.9,
                "doc {} not concentrated: {row:?}",
                doc.id
            );
        }
        // Documents of the same group concentrate on the same topic,
        // different groups on different topics.
        let argmax = |d: usize| {
            let row = model.theta.row(d);
            if row[0] > row[1] {
                0
            } else {
                1
            }
        };
        let a_topic = argmax(0);
        for d in 0..10 {
            assert_eq!(argmax(d), a_topic);
            assert_eq!(argmax(10 + d), 1 - a_topic);
        }

        // Held-out inference: test docs contain only group terms.
        for doc in docs.iter().filter(|d| d.split == Split::Test) {
            let post = infer_topics(doc, &model, 200, 50, 3).unwrap();
            let expected = if doc.id.starts_with('a') { a_topic } else { 1 - a_topic };
            assert!(
                post.0[expected] >= 0.9,
                "doc {}: posterior {:?}",
                doc.id,
                post.0
            );
        }
    }

    #[test]
    fn training_is_deterministic() {
        let (docs, vocab) = two_group_corpus();
        let train = train_docs(&docs);
        let config = LdaConfig {
            topics: 2,
            iterations: 30,
            burn_in: 10,
            thin: 5,
            seed: 5,
            ..LdaConfig::default()
        };
        let a = train_lda_gibbs(&train, &vocab, &config).unwrap();
        let b = train_lda_gibbs(&train, &vocab, &config).unwrap();
        assert_eq!(a, b);
        let pa = infer_topics(&train[0], &a, 50, 10, 11).unwrap();
        let pb = infer_topics(&train[0], &b, 50, 10, 11).unwrap();
        assert_eq!(pa, pb);
    }

    #[test]
    fn simplex_invariants_hold() {
        let (docs, vocab) = two_group_corpus();
        let train = train_docs(&docs);
        let config = LdaConfig {
            topics: 3,
            iterations: 40,
            burn_in: 20,
            thin: 5,
            ..LdaConfig::default()
        };
        let model = train_lda_gibbs(&train, &vocab, &config).unwrap();
        for k in 0..model.n_topics {
            let col: f64 = (0..model.vocab_size).map(|v| model.phi.row(v)[k]).sum();
            assert!((col - 1.0).abs() < 1e-9, "phi column {k} sums to {col}");
        }
        for d in 0..train.len() {
            let row: f64 = model.theta.row(d).iter().sum();
            assert!((row - 1.0).abs() < 1e-9, "theta row {d} sums to {row}");
        }
        for x in model.phi.data() {
            assert!(*x > 0.0);
        }
    }

    #[test]
    fn scores_follow_hand_set_phi() {
        // Hand-built model: 2 terms are PNs with phi rows (0.9, 0.1) and
        // (0.1, 0.9); posterior fully on topic 0.
        let phi = Mat::from_fn(2, 2, |r, c| if r == c { 0.9 } else { 0.1 });
        let model = TopicModel {
            n_topics: 2,
            alpha: 1.0,
            beta: 0.01,
            vocab_size: 2,
            vocab_hash: String::new(),
            phi,
            theta: Mat::zeros(0, 2),
            assignments: vec![],
        };
        let posterior = TopicPosterior(vec![1.0, 0.0]);
        let list = score_oov_pns("d", &posterior, &model, 0, 2).unwrap();
        assert_eq!(list.entries[0], (0, 0.9));
        assert_eq!(list.entries[1], (1, 0.1));
    }

    #[test]
    fn full_vocabulary_scores_sum_to_one() {
        let (docs, vocab) = two_group_corpus();
        let train = train_docs(&docs);
        let config = LdaConfig {
            topics: 4,
            iterations: 30,
            burn_in: 10,
            thin: 5,
            ..LdaConfig::default()
        };
        let model = train_lda_gibbs(&train, &vocab, &config).unwrap();
        // Any posterior on the simplex: totals over the FULL vocabulary are 1.
        for posterior in [
            TopicPosterior(vec![0.25; 4]),
            TopicPosterior(vec![0.7, 0.1, 0.1, 0.1]),
            infer_topics(&train[3], &model, 60, 20, 2).unwrap(),
        ] {
            let total: f64 = (0..model.vocab_size)
                .map(|v| term_score(&posterior, &model, v))
                .sum();
            assert!((total - 1.0).abs() < 1e-9, "total {total}");
        }
    }

    #[test]
    fn single_topic_ranking_is_frequency_ranking() {
        let (docs, vocab) = two_group_corpus();
        let train = train_docs(&docs);
        let config = LdaConfig {
            topics: 1,
            iterations: 20,
            burn_in: 10,
            thin: 5,
            ..LdaConfig::default()
        };
        let model = train_lda_gibbs(&train, &vocab, &config).unwrap();
        let posterior = TopicPosterior(vec![1.0]);
        let list =
            score_oov_pns("d", &posterior, &model, vocab.n_iv(), vocab.n_oov()).unwrap();
        // Scores must be ordered like descending training frequency.
        let counts = vocab.oov_counts();
        for w in list.entries.windows(2) {
            assert!(counts[w[0].0 as usize] >= counts[w[1].0 as usize]);
        }
    }

    #[test]
    fn inference_rejects_empty_documents() {
        let (docs, vocab) = two_group_corpus();
        let train = train_docs(&docs);
        let config = LdaConfig {
            topics: 2,
            iterations: 20,
            burn_in: 10,
            thin: 5,
            ..LdaConfig::default()
        };
        let model = train_lda_gibbs(&train, &vocab, &config).unwrap();
        let empty = Document {
            id: "empty".into(),
            iv_bag: vec![],
            oov_bag: vec![(0, 1)],
            split: Split::Test,
        };
        assert!(matches!(
            infer_topics(&empty, &model, 20, 5, 1),
            Err(Error::EmptyDocument(_))
        ));
    }

    #[test]
    fn adding_posterior_mass_to_a_topic_never_decreases_its_top_pn_score() {
        // Monotonicity on a hand-built model.
        let phi = Mat::from_fn(3, 2, |r, c| match (r, c) {
            (0, 0) => 0.8,
            (0, 1) => 0.05,
            (1, 0) => 0.15,
            (1, 1) => 0.9,
            _ => 0.05,
        });
        let model = TopicModel {
            n_topics: 2,
            alpha: 1.0,
            beta: 0.01,
            vocab_size: 3,
            vocab_hash: String::new(),
            phi,
            theta: Mat::zeros(0, 2),
            assignments: vec![],
        };
        // PN 0 has the largest phi[., 0]; shifting mass toward topic 0 must
        // not decrease its score.
        let mut prev = f64::MIN;
        for w in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let posterior = TopicPosterior(vec![w, 1.0 - w]);
            let s = term_score(&posterior, &model, 0);
            assert!(s >= prev);
            prev = s;
        }
    }
}
