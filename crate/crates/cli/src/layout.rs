//! On-disk layout of a run directory, atomic writes, and the JSONL and
//! sidecar helpers shared by the commands.
//!
//! ```text
//! <data_dir>/
//!   corpus/     train.jsonl validation.jsonl test.jsonl lexicon.txt
//!   prepared/   vocab.json <split>.docs.jsonl <split>.stats.csv
//!   models/     skipgram.in.vec skipgram.out.vec pvdbow.doc.vec
//!               pvdbow.out.vec lda.json <variant>.model.json
//!               <variant>.history.csv  (+ one .meta sidecar per artifact)
//!   ranked/     <method>.<split>[.noiseNN].jsonl
//!   reports/    <name>.eval.csv, diff reports
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use oovrank_core::corpus::Split;
use oovrank_core::io::FileMeta;

#[derive(Debug, Clone)]
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(data_dir: &Path) -> Self {
        Layout {
            root: data_dir.to_path_buf(),
        }
    }

    pub fn corpus_file(&self, split: Split) -> PathBuf {
        self.root.join("corpus").join(format!("{}.jsonl", split.name()))
    }

    pub fn lexicon_file(&self) -> PathBuf {
        self.root.join("corpus").join("lexicon.txt")
    }

    pub fn vocab_file(&self) -> PathBuf {
        self.root.join("prepared").join("vocab.json")
    }

    pub fn prepared_file(&self, split: Split) -> PathBuf {
        self.root
            .join("prepared")
            .join(format!("{}.docs.jsonl", split.name()))
    }

    pub fn stats_file(&self, split: Split) -> PathBuf {
        self.root
            .join("prepared")
            .join(format!("{}.stats.csv", split.name()))
    }

    pub fn models_dir(&self) -> PathBuf {
        self.root.join("models")
    }

    pub fn skipgram_input(&self) -> PathBuf {
        self.models_dir().join("skipgram.in.vec")
    }

    pub fn skipgram_output(&self) -> PathBuf {
        self.models_dir().join("skipgram.out.vec")
    }

    pub fn pv_doc_vectors(&self) -> PathBuf {
        self.models_dir().join("pvdbow.doc.vec")
    }

    pub fn pv_word_output(&self) -> PathBuf {
        self.models_dir().join("pvdbow.out.vec")
    }

    pub fn lda_model(&self) -> PathBuf {
        self.models_dir().join("lda.json")
    }

    pub fn neural_model(&self, variant: &str) -> PathBuf {
        self.models_dir().join(format!("{variant}.model.json"))
    }

    pub fn history_file(&self, variant: &str) -> PathBuf {
        self.models_dir().join(format!("{variant}.history.csv"))
    }

    pub fn ranked_file(&self, method: &str, split: Split, noise: Option<f64>) -> PathBuf {
        let noise_tag = match noise {
            Some(rate) if rate > 0.0 => format!(".noise{:02}", (rate * 100.0).round() as u32),
            _ => String::new(),
        };
        self.root
            .join("ranked")
            .join(format!("{method}.{}{noise_tag}.jsonl", split.name()))
    }

    pub fn reports_dir(&self) -> PathBuf {
        self.root.join("reports")
    }
}

/// Write via a temp file in the same directory, then rename into place.
pub fn atomically(path: &Path, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let tmp = path.with_extension("partial");
    write(&tmp)?;
    fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} into place", path.display()))?;
    Ok(())
}

/// Run metadata sidecar (`<artifact>.meta`): provenance plus wall time.
/// Kept out of the artifact itself so reruns stay byte-identical.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMeta {
    pub config_hash: String,
    pub seed: u64,
    pub wall_ms: u128,
}

pub fn write_meta_sidecar(artifact: &Path, meta: &FileMeta, wall_ms: u128) -> Result<()> {
    let mut name = artifact
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push_str(".meta");
    let path = artifact.with_file_name(name);
    let run = RunMeta {
        config_hash: meta.config_hash.clone(),
        seed: meta.seed,
        wall_ms,
    };
    atomically(&path, |tmp| {
        let mut f = fs::File::create(tmp)?;
        serde_json::to_writer_pretty(&mut f, &run)?;
        f.write_all(b"\n")?;
        Ok(())
    })
}

/// Write records as JSONL after `# key=value` header lines.
pub fn write_jsonl<T: Serialize>(
    path: &Path,
    header: &[(&str, String)],
    items: &[T],
) -> Result<()> {
    atomically(path, |tmp| {
        let mut w = std::io::BufWriter::new(fs::File::create(tmp)?);
        for (k, v) in header {
            writeln!(w, "# {k}={v}")?;
        }
        for item in items {
            serde_json::to_writer(&mut w, item)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    })
}

/// Read a JSONL file, returning the `# key=value` header pairs and records.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<(Vec<(String, String)>, Vec<T>)> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut header = Vec::new();
    let mut items = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once('=') {
                header.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        let item: T = serde_json::from_str(line)
            .with_context(|| format!("{}:{}: bad record", path.display(), lineno + 1))?;
        items.push(item);
    }
    Ok((header, items))
}

pub fn header_value<'a>(header: &'a [(String, String)], key: &str) -> Option<&'a str> {
    header
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
}

/// Write a plain text file atomically.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    atomically(path, |tmp| {
        fs::write(tmp, text)?;
        Ok(())
    })
}
