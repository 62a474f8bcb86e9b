use std::collections::HashSet;

use anyhow::Result;

use oovrank_core::corpus::{
    build_vocabulary, corpus_stats, filter_documents, generate_synthetic, save_corpus,
    save_lexicon, Split,
};

use super::Ctx;
use crate::layout::atomically;

/// Generate the synthetic corpus and lexicon, write them in the documented
/// formats, and print per-split statistics.
pub fn gen_corpus(ctx: &Ctx) -> Result<()> {
    let spec = ctx.config.corpus.synthetic.to_spec(ctx.config.seed);
    let corpus = generate_synthetic(&spec)?;

    for (split, docs) in [
        (Split::Train, &corpus.train),
        (Split::Validation, &corpus.validation),
        (Split::Test, &corpus.test),
    ] {
        let path = ctx.layout.corpus_file(split);
        atomically(&path, |tmp| Ok(save_corpus(tmp, docs, Some(&ctx.meta))?))?;
        println!("wrote {} documents to {}", docs.len(), path.display());
    }
    let lex_path = ctx.layout.lexicon_file();
    atomically(&lex_path, |tmp| {
        Ok(save_lexicon(tmp, &corpus.lexicon, Some(&ctx.meta))?)
    })?;
    println!("wrote {} lexicon terms to {}", corpus.lexicon.len(), lex_path.display());

    // Raw-corpus statistics: everything retained (min_count 1, no stoplist,
    // no length filter beyond non-emptiness).
    let all: Vec<_> = corpus
        .train
        .iter()
        .chain(&corpus.validation)
        .chain(&corpus.test)
        .cloned()
        .collect();
    let vocab = build_vocabulary(&all, &corpus.lexicon, 1, &HashSet::new())?;
    for (split, docs) in [
        (Split::Train, &corpus.train),
        (Split::Validation, &corpus.validation),
        (Split::Test, &corpus.test),
    ] {
        let encoded = filter_documents(docs, &vocab, 1, u32::MAX);
        println!("== {} ==", split.name());
        print!("{}", corpus_stats(&encoded, &vocab).to_text());
    }
    Ok(())
}
