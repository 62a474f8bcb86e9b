//! Corpus and lexicon file formats.
//!
//! Corpus files are UTF-8 with one JSON record per line:
//! `{"id": "...", "tokens": [...], "pn": [0,1,...], "split": "train"}`.
//! The `split` field is optional and defaults to `train`. Lexicon files hold
//! one term per line with an optional tab-separated `PN` marker. Lines
//! starting with `#` are headers and skipped by both readers.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::FileMeta;

use super::{Lexicon, RawDocument, Split};

#[derive(Serialize, Deserialize)]
struct CorpusRecord {
    id: String,
    tokens: Vec<String>,
    pn: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    split: Option<Split>,
}

/// Load a line-delimited corpus file. Token casing is normalized to
/// lower-case; token order is preserved.
pub fn load_corpus(path: &Path) -> Result<Vec<RawDocument>> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut docs = Vec::new();
    let mut seen_ids: HashSet<String> = HashSet::new();
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.display().to_string(),
        line,
        msg,
    };
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let rec: CorpusRecord = serde_json::from_str(trimmed)
            .map_err(|e| parse_err(lineno, format!("malformed record: {e}")))?;
        if rec.tokens.is_empty() {
            return Err(parse_err(lineno, format!("document `{}` has no tokens", rec.id)));
        }
        if rec.pn.len() != rec.tokens.len() {
            return Err(parse_err(
                lineno,
                format!(
                    "document `{}`: `pn` has {} entries for {} tokens",
                    rec.id,
                    rec.pn.len(),
                    rec.tokens.len()
                ),
            ));
        }
        if let Some(bad) = rec.pn.iter().find(|&&b| b > 1) {
            return Err(parse_err(lineno, format!("`pn` entries must be 0 or 1, got {bad}")));
        }
        if !seen_ids.insert(rec.id.clone()) {
            return Err(parse_err(lineno, format!("duplicate document id `{}`", rec.id)));
        }
        docs.push(RawDocument {
            id: rec.id,
            tokens: rec.tokens.iter().map(|t| t.to_lowercase()).collect(),
            pn_tags: rec.pn.iter().map(|&b| b == 1).collect(),
            split: rec.split.unwrap_or(Split::Train),
        });
    }
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(docs)
}

pub fn save_corpus(path: &Path, docs: &[RawDocument], meta: Option<&FileMeta>) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    if let Some(meta) = meta {
        w.write_all(meta.header_lines().as_bytes())?;
    }
    for doc in docs {
        doc.validate()?;
        let rec = CorpusRecord {
            id: doc.id.clone(),
            tokens: doc.tokens.clone(),
            pn: doc.pn_tags.iter().map(|&b| u8::from(b)).collect(),
            split: Some(doc.split),
        };
        serde_json::to_writer(&mut w, &rec)
            .map_err(|e| Error::invalid(format!("serialize record `{}`: {e}", doc.id)))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Load a lexicon file: one term per line, optionally `term<TAB>PN`.
pub fn load_lexicon(path: &Path) -> Result<Lexicon> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut entries = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split('\t');
        let term = parts.next().unwrap().trim();
        let pn = match parts.next().map(str::trim) {
            None => false,
            Some("PN") => true,
            Some(other) => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: lineno + 1,
                    msg: format!("expected `PN` marker, got `{other}`"),
                })
            }
        };
        entries.push((term.to_string(), pn));
    }
    Lexicon::new(entries)
}

pub fn save_lexicon(path: &Path, lexicon: &Lexicon, meta: Option<&FileMeta>) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    if let Some(meta) = meta {
        w.write_all(meta.header_lines().as_bytes())?;
    }
    for (term, pn) in lexicon.sorted_entries() {
        if pn {
            writeln!(w, "{term}\tPN")?;
        } else {
            writeln!(w, "{term}")?;
        }
    }
    w.flush()?;
    Ok(())
}
