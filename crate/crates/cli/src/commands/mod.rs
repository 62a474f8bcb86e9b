pub mod evaluate;
pub mod gen;
pub mod keywords;
pub mod prepare;
pub mod rank;
pub mod train;

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use oovrank_core::corpus::{Document, Split, Vocabulary};
use oovrank_core::io::FileMeta;

use crate::config::RunConfig;
use crate::layout::{read_jsonl, Layout};

/// Everything a command needs: the effective config, the run directory
/// layout, and the provenance stamp for output files.
pub struct Ctx {
    pub config: RunConfig,
    pub layout: Layout,
    pub meta: FileMeta,
}

impl Ctx {
    pub fn new(config: RunConfig) -> Self {
        let layout = Layout::new(&config.paths.data_dir);
        let meta = FileMeta::new(config.hash(), config.seed);
        Ctx {
            config,
            layout,
            meta,
        }
    }

    pub fn header(&self) -> Vec<(&'static str, String)> {
        vec![
            ("config_hash", self.meta.config_hash.clone()),
            ("seed", self.meta.seed.to_string()),
        ]
    }
}

/// An encoded document plus the number of unique OOV PN strings it carried
/// in the raw corpus (including ones the vocabulary could not retain).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PreparedRecord {
    #[serde(flatten)]
    pub doc: Document,
    pub targets_total: usize,
}

pub fn require(path: &Path, produced_by: &str) -> Result<()> {
    if !path.exists() {
        bail!(
            "missing prerequisite artifact `{}`; run `oovrank {produced_by}` first",
            path.display()
        );
    }
    Ok(())
}

pub fn load_vocabulary(ctx: &Ctx) -> Result<Vocabulary> {
    let path = ctx.layout.vocab_file();
    require(&path, "prepare")?;
    let (_, vocab): (FileMeta, Vocabulary) = oovrank_core::io::load_model(&path)
        .with_context(|| format!("loading vocabulary from {}", path.display()))?;
    Ok(vocab)
}

pub fn load_prepared(ctx: &Ctx, split: Split) -> Result<Vec<PreparedRecord>> {
    let path = ctx.layout.prepared_file(split);
    require(&path, "prepare")?;
    let (_, records) = read_jsonl::<PreparedRecord>(&path)?;
    Ok(records)
}
