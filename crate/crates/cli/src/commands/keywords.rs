use std::collections::HashMap;

use anyhow::{bail, Result};

use oovrank_core::corpus::{Document, Split, Vocabulary};
use oovrank_core::neural::{ContextModel, Variant};

use super::rank::load_neural_model;
use super::{load_prepared, Ctx};

const KEYWORD_THRESHOLD: f64 = 0.1;

/// Per-document keyword table: the terms the anchor-weighted model found
/// important (summed weight > 0.1), plus each target PN's rank under the
/// weighted and the uniform model (1-based).
pub fn keywords(ctx: &Ctx, doc_ids: &[String]) -> Result<()> {
    if doc_ids.is_empty() {
        bail!("keywords needs at least one document id");
    }
    let vocab = super::load_vocabulary(ctx)?;
    let weighted = load_importance_model(ctx, &vocab)?;
    let uniform = load_neural_model(ctx, &vocab, Variant::Dcbow)?;

    let mut docs: HashMap<String, Document> = HashMap::new();
    for split in [Split::Train, Split::Validation, Split::Test] {
        if ctx.layout.prepared_file(split).exists() {
            for r in load_prepared(ctx, split)? {
                docs.insert(r.doc.id.clone(), r.doc);
            }
        }
    }

    for id in doc_ids {
        let Some(doc) = docs.get(id) else {
            bail!("document `{id}` not found in any prepared split");
        };
        println!("document {id}");
        let kws = weighted.extract_keywords(doc, KEYWORD_THRESHOLD)?;
        if kws.is_empty() {
            println!("  keywords: (none above {KEYWORD_THRESHOLD})");
        } else {
            let rendered: Vec<String> = kws
                .iter()
                .map(|&(term, w)| format!("{} ({w:.3})", vocab.iv_term(term)))
                .collect();
            println!("  keywords: {}", rendered.join(", "));
        }
        let ranked_w = weighted.rank_oov_pns(doc);
        let ranked_u = uniform.rank_oov_pns(doc);
        for target in doc.targets() {
            let r2 = ranked_w.rank_of(target).unwrap_or(0);
            let r = ranked_u.rank_of(target).unwrap_or(0);
            println!(
                "  target {:<20} R2={r2:<6} R={r}",
                vocab.oov_pn(target)
            );
        }
    }
    Ok(())
}

/// The concatenated variant carries the same importance layer; prefer it
/// when both are trained.
fn load_importance_model(ctx: &Ctx, vocab: &Vocabulary) -> Result<ContextModel> {
    for variant in [Variant::Dcbow2Plus, Variant::Dcbow2] {
        if ctx.layout.neural_model(variant.name()).exists() {
            return load_neural_model(ctx, vocab, variant);
        }
    }
    bail!(
        "keyword extraction needs a trained dcbow2 or dcbow2plus model; \
         the uniform-bag model has no importance layer"
    );
}
