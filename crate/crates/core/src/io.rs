//! Shared on-disk container helpers.
//!
//! Model files are JSON envelopes `{"meta": ..., "data": ...}` so every
//! artifact records the seed and config hash that produced it. Line-oriented
//! text formats (corpora, ranked lists) instead carry `# key=value` comment
//! lines before the records; readers skip any line starting with `#`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Provenance recorded in every artifact produced by a run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileMeta {
    pub config_hash: String,
    pub seed: u64,
}

impl FileMeta {
    pub fn new(config_hash: impl Into<String>, seed: u64) -> Self {
        FileMeta {
            config_hash: config_hash.into(),
            seed,
        }
    }

    /// Render as `# key=value` comment lines for line-oriented formats.
    pub fn header_lines(&self) -> String {
        format!("# config_hash={}\n# seed={}\n", self.config_hash, self.seed)
    }
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    meta: FileMeta,
    data: T,
}

/// Write a model artifact as a JSON envelope. `serde_json` prints `f64`s in
/// shortest round-trip form, so reals reload bit-exactly.
pub fn save_model<T: Serialize>(path: &Path, meta: &FileMeta, data: &T) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer(
        &mut w,
        &Envelope {
            meta: meta.clone(),
            data,
        },
    )
    .map_err(|e| Error::invalid(format!("{}: serialize failed: {e}", path.display())))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn load_model<T: DeserializeOwned>(path: &Path) -> Result<(FileMeta, T)> {
    let file = File::open(path)?;
    let env: Envelope<T> = serde_json::from_reader(BufReader::new(file)).map_err(|e| {
        Error::invalid(format!("{}: not a valid model file: {e}", path.display()))
    })?;
    Ok((env.meta, env.data))
}
