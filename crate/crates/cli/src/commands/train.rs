use std::collections::HashSet;
use std::time::Instant;

use anyhow::{bail, Context, Result};

use oovrank_core::corpus::{encode_sequence, load_corpus, Document, Split, Vocabulary};
use oovrank_core::embeddings::{
    load_embeddings, save_embeddings, train_pv_dbow, train_skipgram, Side,
};
use oovrank_core::lda::train_lda_gibbs;
use oovrank_core::neural::{train_phase1, train_two_phase, validation_error, Variant};

use super::{load_prepared, load_vocabulary, require, Ctx};
use crate::layout::{atomically, write_meta_sidecar, write_text};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TrainMethod {
    Skipgram,
    Pvdbow,
    Lda,
    Dcbow,
    Dcbow2,
    Dcbow2plus,
}

pub fn train(ctx: &Ctx, method: TrainMethod) -> Result<()> {
    let vocab = load_vocabulary(ctx)?;
    match method {
        TrainMethod::Skipgram => train_skipgram_cmd(ctx, &vocab),
        TrainMethod::Pvdbow => train_pvdbow_cmd(ctx, &vocab),
        TrainMethod::Lda => train_lda_cmd(ctx, &vocab),
        TrainMethod::Dcbow => train_neural_cmd(ctx, &vocab, Variant::Dcbow),
        TrainMethod::Dcbow2 => train_neural_cmd(ctx, &vocab, Variant::Dcbow2),
        TrainMethod::Dcbow2plus => train_neural_cmd(ctx, &vocab, Variant::Dcbow2Plus),
    }
}

fn combined_labels(vocab: &Vocabulary) -> Vec<String> {
    vocab
        .iv_terms()
        .iter()
        .chain(vocab.oov_pns())
        .cloned()
        .collect()
}

fn train_docs(ctx: &Ctx) -> Result<Vec<Document>> {
    Ok(load_prepared(ctx, Split::Train)?
        .into_iter()
        .map(|r| r.doc)
        .collect())
}

fn train_skipgram_cmd(ctx: &Ctx, vocab: &Vocabulary) -> Result<()> {
    // Ordered token sequences come from the raw corpus, restricted to the
    // documents that survived the length filter.
    let surviving: HashSet<String> = train_docs(ctx)?.into_iter().map(|d| d.id).collect();
    let raws = load_corpus(&ctx.layout.corpus_file(Split::Train))?;
    let sequences: Vec<Vec<u32>> = raws
        .iter()
        .filter(|r| surviving.contains(&r.id))
        .map(|r| encode_sequence(r, vocab))
        .collect();

    let config = ctx.config.skipgram.to_config(ctx.config.seed);
    let started = Instant::now();
    let (input, output) = train_skipgram(&sequences, &vocab.combined_counts(), &config)?;
    let wall = started.elapsed().as_millis();

    let labels = combined_labels(vocab);
    for (path, emb) in [
        (ctx.layout.skipgram_input(), &input),
        (ctx.layout.skipgram_output(), &output),
    ] {
        atomically(&path, |tmp| Ok(save_embeddings(tmp, emb, &labels)?))?;
        write_meta_sidecar(&path, &ctx.meta, wall)?;
        println!("wrote {} ({} x {})", path.display(), emb.len(), emb.dim());
    }
    Ok(())
}

fn train_pvdbow_cmd(ctx: &Ctx, vocab: &Vocabulary) -> Result<()> {
    let docs = train_docs(ctx)?;
    let config = ctx.config.skipgram.to_config(ctx.config.seed);
    let started = Instant::now();
    let (doc_vecs, word_output) =
        train_pv_dbow(&docs, &vocab.combined_counts(), vocab.n_iv(), &config)?;
    let wall = started.elapsed().as_millis();

    let doc_labels: Vec<String> = docs.iter().map(|d| d.id.clone()).collect();
    let path = ctx.layout.pv_doc_vectors();
    atomically(&path, |tmp| Ok(save_embeddings(tmp, &doc_vecs, &doc_labels)?))?;
    write_meta_sidecar(&path, &ctx.meta, wall)?;

    let labels = combined_labels(vocab);
    let path = ctx.layout.pv_word_output();
    atomically(&path, |tmp| Ok(save_embeddings(tmp, &word_output, &labels)?))?;
    write_meta_sidecar(&path, &ctx.meta, wall)?;
    println!(
        "wrote {} document vectors and {} word output vectors",
        doc_vecs.len(),
        word_output.len()
    );
    Ok(())
}

fn train_lda_cmd(ctx: &Ctx, vocab: &Vocabulary) -> Result<()> {
    let docs = train_docs(ctx)?;
    let config = ctx.config.lda.to_config(ctx.config.seed);
    let started = Instant::now();
    let model = train_lda_gibbs(&docs, vocab, &config)?;
    let wall = started.elapsed().as_millis();

    let path = ctx.layout.lda_model();
    atomically(&path, |tmp| {
        Ok(oovrank_core::io::save_model(tmp, &ctx.meta, &model)?)
    })?;
    write_meta_sidecar(&path, &ctx.meta, wall)?;
    println!(
        "wrote {} ({} topics over {} terms)",
        path.display(),
        model.n_topics,
        model.vocab_size
    );
    Ok(())
}

fn train_neural_cmd(ctx: &Ctx, vocab: &Vocabulary, variant: Variant) -> Result<()> {
    let emb_path = ctx.layout.skipgram_input();
    require(&emb_path, "train skipgram")?;
    let (labels, combined) = load_embeddings(&emb_path, Side::Combined)?;
    if labels != combined_labels(vocab) {
        bail!(
            "`{}` was trained on a different vocabulary; rerun `oovrank train skipgram`",
            emb_path.display()
        );
    }
    let (pretrained_iv, _) = combined.split_combined(vocab.n_iv())?;

    let train = train_docs(ctx)?;
    let valid: Vec<Document> = load_prepared(ctx, Split::Validation)
        .context("neural training needs a prepared validation split")?
        .into_iter()
        .map(|r| r.doc)
        .collect();

    let config = ctx.config.neural.to_config(ctx.config.seed);
    let started = Instant::now();
    let (mut model, history) = if ctx.config.neural.phases == 1 {
        train_phase1(&train, &valid, &pretrained_iv, variant, vocab.n_oov(), &config)?
    } else {
        train_two_phase(&train, &valid, &pretrained_iv, variant, vocab.n_oov(), &config)?
    };
    let wall = started.elapsed().as_millis();
    model.iv_hash = vocab.iv_hash();
    model.oov_hash = vocab.oov_hash();

    let path = ctx.layout.neural_model(variant.name());
    atomically(&path, |tmp| {
        Ok(oovrank_core::io::save_model(tmp, &ctx.meta, &model)?)
    })?;
    write_meta_sidecar(&path, &ctx.meta, wall)?;

    let hist_path = ctx.layout.history_file(variant.name());
    let mut csv = String::new();
    for (k, v) in ctx.header() {
        csv.push_str(&format!("# {k}={v}\n"));
    }
    csv.push_str(&history.to_csv());
    write_text(&hist_path, &csv)?;

    let usable: Vec<Document> = valid
        .iter()
        .filter(|d| d.has_targets() && !d.iv_bag.is_empty())
        .cloned()
        .collect();
    let final_err = validation_error(&model, &usable)?;
    println!(
        "wrote {} ({} evaluations, final validation error {:.4})",
        path.display(),
        history.records.len(),
        final_err
    );
    Ok(())
}
