use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use oovrank_core::corpus::{inject_noise, mix_seed, Document, Split, Vocabulary};
use oovrank_core::embeddings::{
    average_vec, cosine_rank, infer_doc_vector, load_embeddings, EmbeddingMatrix, Side,
};
use oovrank_core::eval::RankedList;
use oovrank_core::io::FileMeta;
use oovrank_core::lda::{infer_topics, score_oov_pns, TopicModel};
use oovrank_core::neural::{ContextModel, Variant};

use super::{load_prepared, load_vocabulary, require, Ctx};
use crate::layout::write_jsonl;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RankMethod {
    Averagevec,
    Pvdbow,
    Lda,
    Dcbow,
    Dcbow2,
    Dcbow2plus,
}

impl RankMethod {
    pub fn name(&self) -> &'static str {
        match self {
            RankMethod::Averagevec => "averagevec",
            RankMethod::Pvdbow => "pvdbow",
            RankMethod::Lda => "lda",
            RankMethod::Dcbow => "dcbow",
            RankMethod::Dcbow2 => "dcbow2",
            RankMethod::Dcbow2plus => "dcbow2plus",
        }
    }
}

/// Rank the OOV PN vocabulary for every document of a split, optionally
/// simulating transcription noise first, and write one ranked list per
/// document.
pub fn rank(ctx: &Ctx, method: RankMethod, split: Split, noise: Option<f64>) -> Result<()> {
    let vocab = load_vocabulary(ctx)?;
    let mut docs: Vec<Document> = load_prepared(ctx, split)?
        .into_iter()
        .map(|r| r.doc)
        .collect();
    if docs.is_empty() {
        bail!("no prepared documents in the {} split", split.name());
    }

    let noise_rate = noise.unwrap_or(0.0);
    if noise_rate > 0.0 {
        let mut corrupted = 0u64;
        for (i, doc) in docs.iter_mut().enumerate() {
            let (noisy, stats) =
                inject_noise(doc, noise_rate, &vocab, mix_seed(ctx.config.seed, i as u64))?;
            *doc = noisy;
            corrupted += stats.corrupted();
        }
        log::info!("noise rate {noise_rate}: corrupted {corrupted} token occurrences");
    } else if let Some(rate) = noise {
        // rate 0 requested explicitly: identical to a no-noise run.
        debug_assert_eq!(rate, 0.0);
    }

    let lists = rank_documents(ctx, method, &vocab, &docs)?;
    let mut lists = lists;
    if let Some(n) = ctx.config.eval.top_n_max {
        for l in lists.iter_mut() {
            l.truncate(n);
        }
    }
    let degenerate = lists.iter().filter(|l| l.is_degenerate()).count();
    if degenerate > 0 {
        log::warn!("{degenerate} documents had no scorable tokens and were ranked uniformly");
    }

    let mut header = ctx.header();
    header.push(("method", method.name().to_string()));
    header.push(("split", split.name().to_string()));
    header.push(("noise", noise_rate.to_string()));
    header.push(("n_oov", vocab.n_oov().to_string()));
    let path = ctx.layout.ranked_file(method.name(), split, noise);
    write_jsonl(&path, &header, &lists)?;
    println!(
        "wrote {} ranked lists to {} ({} degenerate)",
        lists.len(),
        path.display(),
        degenerate
    );
    Ok(())
}

fn rank_documents(
    ctx: &Ctx,
    method: RankMethod,
    vocab: &Vocabulary,
    docs: &[Document],
) -> Result<Vec<RankedList>> {
    match method {
        RankMethod::Averagevec => {
            let path = ctx.layout.skipgram_input();
            require(&path, "train skipgram")?;
            let (_, combined) = load_embeddings(&path, Side::Combined)?;
            check_rows(&combined, vocab)?;
            let (iv, oov) = combined.split_combined(vocab.n_iv())?;
            map_docs(ctx, docs, move |_, doc| {
                if doc.iv_bag.is_empty() {
                    return Ok(degenerate_list(&doc.id, vocab.n_oov()));
                }
                let h = average_vec(doc, &iv)?;
                match cosine_rank(&doc.id, &h, &oov) {
                    Ok(list) => Ok(list),
                    Err(_) => Ok(degenerate_list(&doc.id, vocab.n_oov())),
                }
            })
        }
        RankMethod::Pvdbow => {
            let path = ctx.layout.pv_word_output();
            require(&path, "train pvdbow")?;
            let (_, word_output) = load_embeddings(&path, Side::Combined)?;
            check_rows(&word_output, vocab)?;
            let (_, oov) = word_output.split_combined(vocab.n_iv())?;
            let counts = vocab.combined_counts();
            let steps = ctx.config.skipgram.infer_steps;
            let lr = ctx.config.skipgram.infer_lr;
            let seed = ctx.config.seed;
            map_docs(ctx, docs, move |i, doc| {
                if doc.iv_bag.is_empty() {
                    return Ok(degenerate_list(&doc.id, vocab.n_oov()));
                }
                let h = infer_doc_vector(
                    doc,
                    &word_output,
                    &counts,
                    steps,
                    lr,
                    mix_seed(seed ^ 0x5eed, i as u64),
                )?;
                match cosine_rank(&doc.id, &h, &oov) {
                    Ok(list) => Ok(list),
                    Err(_) => Ok(degenerate_list(&doc.id, vocab.n_oov())),
                }
            })
        }
        RankMethod::Lda => {
            let path = ctx.layout.lda_model();
            require(&path, "train lda")?;
            let (_, model): (FileMeta, TopicModel) = oovrank_core::io::load_model(&path)?;
            if model.vocab_hash != vocab.content_hash() {
                bail!(
                    "`{}` was trained on a different vocabulary; rerun `oovrank train lda`",
                    path.display()
                );
            }
            let iterations = ctx.config.lda.infer_iterations;
            let burn_in = ctx.config.lda.infer_burn_in;
            let seed = ctx.config.seed;
            map_docs(ctx, docs, move |i, doc| {
                let posterior =
                    match infer_topics(doc, &model, iterations, burn_in, mix_seed(seed, i as u64)) {
                        Ok(p) => p,
                        Err(oovrank_core::Error::EmptyDocument(_)) => {
                            return Ok(degenerate_list(&doc.id, vocab.n_oov()))
                        }
                        Err(e) => return Err(e.into()),
                    };
                Ok(score_oov_pns(
                    &doc.id,
                    &posterior,
                    &model,
                    vocab.n_iv(),
                    vocab.n_oov(),
                )?)
            })
        }
        RankMethod::Dcbow | RankMethod::Dcbow2 | RankMethod::Dcbow2plus => {
            let variant = match method {
                RankMethod::Dcbow => Variant::Dcbow,
                RankMethod::Dcbow2 => Variant::Dcbow2,
                _ => Variant::Dcbow2Plus,
            };
            let model = load_neural_model(ctx, vocab, variant)?;
            map_docs(ctx, docs, move |_, doc| Ok(model.rank_oov_pns(doc)))
        }
    }
}

pub fn load_neural_model(ctx: &Ctx, vocab: &Vocabulary, variant: Variant) -> Result<ContextModel> {
    let path = ctx.layout.neural_model(variant.name());
    require(&path, &format!("train {}", variant.name()))?;
    let (_, model): (FileMeta, ContextModel) = oovrank_core::io::load_model(&path)
        .with_context(|| format!("loading {}", path.display()))?;
    if model.iv_hash != vocab.iv_hash() || model.oov_hash != vocab.oov_hash() {
        bail!(
            "`{}` was trained on a different vocabulary; rerun `oovrank train {}`",
            path.display(),
            variant.name()
        );
    }
    Ok(model)
}

fn degenerate_list(doc_id: &str, n_oov: usize) -> RankedList {
    let uniform = vec![1.0 / n_oov as f64; n_oov];
    let mut list = RankedList::from_scores(doc_id, &uniform);
    list.mark_degenerate();
    list
}

fn check_rows(emb: &EmbeddingMatrix, vocab: &Vocabulary) -> Result<()> {
    if emb.len() != vocab.n_combined() {
        bail!(
            "embedding file has {} rows for a vocabulary of {}; retrain",
            emb.len(),
            vocab.n_combined()
        );
    }
    Ok(())
}

/// Rank documents in order, sequentially when `threads` is 0 and on a rayon
/// pool otherwise. Per-document seeds keep the results identical either way.
fn map_docs<F>(ctx: &Ctx, docs: &[Document], f: F) -> Result<Vec<RankedList>>
where
    F: Fn(usize, &Document) -> Result<RankedList> + Sync,
{
    if ctx.config.threads == 0 {
        docs.iter().enumerate().map(|(i, d)| f(i, d)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(ctx.config.threads)
            .build()
            .context("building thread pool")?;
        pool.install(|| docs.par_iter().enumerate().map(|(i, d)| f(i, d)).collect())
    }
}
