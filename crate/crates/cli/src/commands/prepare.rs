use std::collections::{HashMap, HashSet};

use anyhow::{bail, Context, Result};

use oovrank_core::corpus::{
    build_vocabulary, corpus_stats, filter_documents, load_corpus, load_lexicon, oov_pn_strings,
    RawDocument, Split,
};

use super::{load_prepared, load_vocabulary, require, Ctx, PreparedRecord};
use crate::layout::{atomically, write_jsonl, write_text};

const SPLITS: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

/// Build the vocabulary from the training split and encode every split
/// against it, emitting per-split statistics.
pub fn prepare(ctx: &Ctx) -> Result<()> {
    let lex_path = ctx.layout.lexicon_file();
    require(&lex_path, "gen-corpus")?;
    let lexicon = load_lexicon(&lex_path)?;

    let mut raws: Vec<RawDocument> = Vec::new();
    for split in SPLITS {
        let path = ctx.layout.corpus_file(split);
        if path.exists() {
            raws.extend(load_corpus(&path)?);
        } else if split == Split::Train {
            bail!("missing corpus file `{}`; run `oovrank gen-corpus` or provide one", path.display());
        } else {
            log::warn!("no {} corpus at {}", split.name(), path.display());
        }
    }

    let stoplist: HashSet<String> = match &ctx.config.corpus.stoplist {
        None => HashSet::new(),
        Some(path) => std::fs::read_to_string(path)
            .with_context(|| format!("reading stoplist {}", path.display()))?
            .lines()
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect(),
    };

    let vocab = build_vocabulary(&raws, &lexicon, ctx.config.corpus.min_count, &stoplist)?;
    let docs = filter_documents(
        &raws,
        &vocab,
        ctx.config.corpus.min_terms,
        ctx.config.corpus.max_terms,
    );
    let totals: HashMap<&str, usize> = raws
        .iter()
        .map(|r| (r.id.as_str(), oov_pn_strings(r, &lexicon).len()))
        .collect();

    let vocab_path = ctx.layout.vocab_file();
    atomically(&vocab_path, |tmp| {
        Ok(oovrank_core::io::save_model(tmp, &ctx.meta, &vocab)?)
    })?;
    println!(
        "vocabulary: {} IV terms, {} OOV PNs -> {}",
        vocab.n_iv(),
        vocab.n_oov(),
        vocab_path.display()
    );

    for split in SPLITS {
        let records: Vec<PreparedRecord> = docs
            .iter()
            .filter(|d| d.split == split)
            .map(|d| PreparedRecord {
                doc: d.clone(),
                targets_total: totals.get(d.id.as_str()).copied().unwrap_or(0),
            })
            .collect();
        let split_docs: Vec<_> = records.iter().map(|r| r.doc.clone()).collect();
        write_jsonl(&ctx.layout.prepared_file(split), &ctx.header(), &records)?;

        let report = corpus_stats(&split_docs, &vocab);
        let mut csv = String::new();
        for (k, v) in ctx.header() {
            csv.push_str(&format!("# {k}={v}\n"));
        }
        csv.push_str(&report.to_csv());
        write_text(&ctx.layout.stats_file(split), &csv)?;
        println!("== {} ({} documents) ==", split.name(), records.len());
        print!("{}", report.to_text());
    }
    Ok(())
}

/// Print statistics of the prepared splits.
pub fn stats(ctx: &Ctx, split: Option<Split>) -> Result<()> {
    let vocab = load_vocabulary(ctx)?;
    let splits: Vec<Split> = match split {
        Some(s) => vec![s],
        None => SPLITS.to_vec(),
    };
    for split in splits {
        let records = load_prepared(ctx, split)?;
        let docs: Vec<_> = records.into_iter().map(|r| r.doc).collect();
        println!("== {} ({} documents) ==", split.name(), docs.len());
        print!("{}", corpus_stats(&docs, &vocab).to_text());
    }
    Ok(())
}
