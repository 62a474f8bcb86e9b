//! Run configuration: one TOML file with namespaced sections, overridable
//! key-by-key from the command line. Precedence: `--set` > file > defaults.
//! Unknown keys are rejected at every layer.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use oovrank_core::corpus::SyntheticSpec;
use oovrank_core::embeddings::SkipgramConfig;
use oovrank_core::lda::LdaConfig;
use oovrank_core::neural::TrainConfig;

use crate::UsageError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    /// 0 = deterministic single-threaded; N > 0 allows N worker threads for
    /// the per-document ranking loops.
    pub threads: usize,
    pub paths: PathsConfig,
    pub corpus: CorpusSection,
    pub skipgram: SkipgramSection,
    pub lda: LdaSection,
    pub neural: NeuralSection,
    pub eval: EvalSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            threads: 0,
            paths: PathsConfig::default(),
            corpus: CorpusSection::default(),
            skipgram: SkipgramSection::default(),
            lda: LdaSection::default(),
            neural: NeuralSection::default(),
            eval: EvalSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsConfig {
    pub data_dir: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig {
            data_dir: PathBuf::from("data"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorpusSection {
    pub min_count: u32,
    pub min_terms: u32,
    pub max_terms: u32,
    pub stoplist: Option<PathBuf>,
    pub synthetic: SyntheticSection,
}

impl Default for CorpusSection {
    fn default() -> Self {
        CorpusSection {
            min_count: 3,
            min_terms: 20,
            max_terms: 500,
            stoplist: None,
            synthetic: SyntheticSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticSection {
    pub n_topics: usize,
    pub docs_per_topic: usize,
    pub pns_per_topic: usize,
    pub keywords_per_topic: usize,
    pub shared_vocab_size: usize,
    pub doc_length_min: usize,
    pub doc_length_max: usize,
    pub keyword_rate: f64,
}

impl Default for SyntheticSection {
    fn default() -> Self {
        let s = SyntheticSpec::default();
        SyntheticSection {
            n_topics: s.n_topics,
            docs_per_topic: s.docs_per_topic,
            pns_per_topic: s.pns_per_topic,
            keywords_per_topic: s.keywords_per_topic,
            shared_vocab_size: s.shared_vocab_size,
            doc_length_min: s.doc_length_range.0,
            doc_length_max: s.doc_length_range.1,
            keyword_rate: s.keyword_rate,
        }
    }
}

impl SyntheticSection {
    pub fn to_spec(&self, seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            n_topics: self.n_topics,
            docs_per_topic: self.docs_per_topic,
            pns_per_topic: self.pns_per_topic,
            keywords_per_topic: self.keywords_per_topic,
            shared_vocab_size: self.shared_vocab_size,
            doc_length_range: (self.doc_length_min, self.doc_length_max),
            keyword_rate: self.keyword_rate,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SkipgramSection {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub min_lr: f64,
    pub subsample_threshold: f64,
    /// Document-vector inference passes and learning rate (PV-DBOW ranking).
    pub infer_steps: usize,
    pub infer_lr: f64,
}

impl Default for SkipgramSection {
    fn default() -> Self {
        let s = SkipgramConfig::default();
        SkipgramSection {
            dim: s.dim,
            window: s.window,
            negatives: s.negatives,
            epochs: s.epochs,
            initial_lr: s.initial_lr,
            min_lr: s.min_lr,
            subsample_threshold: s.subsample_threshold,
            infer_steps: 50,
            infer_lr: 0.025,
        }
    }
}

impl SkipgramSection {
    pub fn to_config(&self, seed: u64) -> SkipgramConfig {
        SkipgramConfig {
            dim: self.dim,
            window: self.window,
            negatives: self.negatives,
            epochs: self.epochs,
            initial_lr: self.initial_lr,
            min_lr: self.min_lr,
            seed,
            subsample_threshold: self.subsample_threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LdaSection {
    pub topics: usize,
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub infer_iterations: usize,
    pub infer_burn_in: usize,
}

impl Default for LdaSection {
    fn default() -> Self {
        let c = LdaConfig::default();
        LdaSection {
            topics: c.topics,
            alpha: c.alpha,
            beta: c.beta,
            iterations: c.iterations,
            burn_in: c.burn_in,
            thin: c.thin,
            infer_iterations: 200,
            infer_burn_in: 50,
        }
    }
}

impl LdaSection {
    pub fn to_config(&self, seed: u64) -> LdaConfig {
        LdaConfig {
            topics: self.topics,
            alpha: self.alpha,
            beta: self.beta,
            iterations: self.iterations,
            burn_in: self.burn_in,
            thin: self.thin,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NeuralSection {
    pub lr_phase1: f64,
    pub lr_phase2: f64,
    pub batch_size: usize,
    pub max_epochs_per_phase: usize,
    pub patience_phase1: usize,
    pub patience_phase2: usize,
    pub eval_every: usize,
    /// 1 = stop after the frozen phase; 2 = full two-phase training.
    pub phases: u8,
}

impl Default for NeuralSection {
    fn default() -> Self {
        let c = TrainConfig::default();
        NeuralSection {
            lr_phase1: c.lr_phase1,
            lr_phase2: c.lr_phase2,
            batch_size: c.batch_size,
            max_epochs_per_phase: c.max_epochs_per_phase,
            patience_phase1: c.patience_phase1,
            patience_phase2: c.patience_phase2,
            eval_every: c.eval_every,
            phases: 2,
        }
    }
}

impl NeuralSection {
    pub fn to_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            lr_phase1: self.lr_phase1,
            lr_phase2: self.lr_phase2,
            batch_size: self.batch_size,
            max_epochs_per_phase: self.max_epochs_per_phase,
            patience_phase1: self.patience_phase1,
            patience_phase2: self.patience_phase2,
            eval_every: self.eval_every,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    /// Cutoff sweep; None = powers of two capped at the OOV vocabulary size.
    pub cutoffs: Option<Vec<usize>>,
    /// Truncate ranked-list files to the top N entries.
    pub top_n_max: Option<usize>,
}

impl RunConfig {
    /// Load: file (if any) over defaults, then `--set key=value` overrides,
    /// then the global `--seed`/`--threads` flags.
    pub fn load(
        file: Option<&Path>,
        sets: &[String],
        seed_flag: Option<u64>,
        threads_flag: Option<usize>,
    ) -> Result<RunConfig, UsageError> {
        let mut config = match file {
            None => RunConfig::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    UsageError(format!("cannot read config `{}`: {e}", path.display()))
                })?;
                toml::from_str(&text).map_err(|e| {
                    UsageError(format!("config `{}`: {e}", path.display()))
                })?
            }
        };
        if !sets.is_empty() {
            let mut value = serde_json::to_value(&config)
                .map_err(|e| UsageError(format!("internal: config serialize: {e}")))?;
            for kv in sets {
                let (key, raw) = kv
                    .split_once('=')
                    .ok_or_else(|| UsageError(format!("--set expects KEY=VALUE, got `{kv}`")))?;
                apply_override(&mut value, key.trim(), raw.trim())?;
            }
            config = serde_json::from_value(value)
                .map_err(|e| UsageError(format!("invalid --set override: {e}")))?;
        }
        if let Some(seed) = seed_flag {
            config.seed = seed;
        }
        if let Some(threads) = threads_flag {
            config.threads = threads;
        }
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), UsageError> {
        let bad = |msg: &str| Err(UsageError(msg.to_string()));
        if self.corpus.min_count < 1 {
            return bad("corpus.min_count must be at least 1");
        }
        if self.corpus.min_terms > self.corpus.max_terms {
            return bad("corpus.min_terms must not exceed corpus.max_terms");
        }
        if !(self.neural.phases == 1 || self.neural.phases == 2) {
            return bad("neural.phases must be 1 or 2");
        }
        if let Some(cutoffs) = &self.eval.cutoffs {
            if cutoffs.is_empty() || cutoffs.iter().any(|&c| c == 0) {
                return bad("eval.cutoffs must be non-empty positive integers");
            }
        }
        // Module-level invariants are revalidated where they are consumed;
        // the cheap ones are worth failing fast on.
        self.skipgram
            .to_config(self.seed)
            .validate()
            .map_err(|e| UsageError(e.to_string()))?;
        self.lda
            .to_config(self.seed)
            .validate()
            .map_err(|e| UsageError(e.to_string()))?;
        self.neural
            .to_config(self.seed)
            .validate()
            .map_err(|e| UsageError(e.to_string()))?;
        Ok(())
    }

    /// Hash of the effective configuration; stamped into every output file
    /// so a run can be reproduced exactly.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut h = Sha256::new();
        h.update(canonical.as_bytes());
        let d = h.finalize();
        d.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

fn apply_override(
    value: &mut serde_json::Value,
    key: &str,
    raw: &str,
) -> Result<(), UsageError> {
    let pointer = format!("/{}", key.replace('.', "/"));
    let slot = value
        .pointer_mut(&pointer)
        .ok_or_else(|| UsageError(format!("unknown config key `{key}`")))?;
    // Values parse as JSON when they can (numbers, booleans, arrays) and
    // fall back to strings (paths, names).
    *slot = serde_json::from_str(raw)
        .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    Ok(())
}
