use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::corpus::{Document, Split};
use crate::embeddings::{average_vec, EmbeddingMatrix, Side};
use crate::matrix::norm;

fn doc(id: &str, iv: &[(u32, u32)], targets: &[u32]) -> Document {
    Document {
        id: id.to_string(),
        iv_bag: iv.to_vec(),
        oov_bag: targets.iter().map(|&t| (t, 1)).collect(),
        split: Split::Train,
    }
}

fn random_model(variant: Variant, k: usize, n_iv: usize, n_oov: usize, seed: u64) -> ContextModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = variant.context_dim(k);
    ContextModel {
        variant,
        k,
        w_iv: Mat::from_fn(n_iv, k, |_, _| rng.random_range(-0.8..0.8)),
        w_oov: Mat::from_fn(n_oov, c, |_, _| rng.random_range(-0.8..0.8)),
        b_oov: (0..n_oov).map(|_| rng.random_range(-0.5..0.5)).collect(),
        anchor: variant
            .has_anchor()
            .then(|| (0..k).map(|_| rng.random_range(-0.5..0.5)).collect()),
        iv_hash: String::new(),
        oov_hash: String::new(),
    }
}

fn zero_model(variant: Variant, k: usize, n_iv: usize, n_oov: usize) -> ContextModel {
    ContextModel {
        variant,
        k,
        w_iv: Mat::from_fn(n_iv, k, |r, c| 0.1 * (r as f64 + 1.0) * ((c as f64) - 1.5)),
        w_oov: Mat::zeros(n_oov, variant.context_dim(k)),
        b_oov: vec![0.0; n_oov],
        anchor: variant.has_anchor().then(|| vec![0.0; k]),
        iv_hash: String::new(),
        oov_hash: String::new(),
    }
}

#[test]
fn dcbow_context_matches_average_vec_and_weighting() {
    let model = random_model(Variant::Dcbow, 4, 6, 3, 1);
    // Single token: exactly that row.
    let d = doc("a", &[(2, 1)], &[0]);
    assert_eq!(context_dcbow(&d, &model.w_iv).unwrap(), model.w_iv.row(2));
    // Shared definition with the embeddings-side average.
    let d = doc("b", &[(0, 2), (3, 1), (5, 4)], &[0]);
    let emb = EmbeddingMatrix::new(Side::Iv, model.w_iv.clone()).unwrap();
    assert_eq!(
        context_dcbow(&d, &model.w_iv).unwrap(),
        average_vec(&d, &emb).unwrap()
    );
    // {a:1, b:3} -> (v_a + 3 v_b) / 4.
    let d = doc("c", &[(0, 1), (1, 3)], &[0]);
    let c = context_dcbow(&d, &model.w_iv).unwrap();
    for i in 0..4 {
        let want = (model.w_iv.row(0)[i] + 3.0 * model.w_iv.row(1)[i]) / 4.0;
        assert!((c[i] - want).abs() < 1e-15);
    }
    // Empty bag errors.
    assert!(context_dcbow(&doc("d", &[], &[]), &model.w_iv).is_err());
}

#[test]
fn importance_weights_uniform_for_zero_anchor() {
    let model = zero_model(Variant::Dcbow2, 4, 6, 3);
    let d = doc("a", &[(0, 2), (3, 1)], &[0]);
    let w = importance_weights(&d, &model.w_iv, model.anchor.as_ref().unwrap()).unwrap();
    assert_eq!(w.len(), 3, "one entry per occurrence");
    for wi in &w {
        assert!((wi - 1.0 / 3.0).abs() < 1e-15);
    }
}

#[test]
fn importance_weights_analytic_softmax_and_shift_invariance() {
    // One-dimensional embeddings so the anchor dot products are explicit.
    let mk = |d0: f64, d1: f64| ContextModel {
        variant: Variant::Dcbow2,
        k: 1,
        w_iv: Mat::from_fn(2, 1, |r, _| if r == 0 { d0 } else { d1 }),
        w_oov: Mat::zeros(2, 1),
        b_oov: vec![0.0; 2],
        anchor: Some(vec![1.0]),
        iv_hash: String::new(),
        oov_hash: String::new(),
    };
    let d = doc("a", &[(0, 1), (1, 1)], &[0]);
    // delta = (0, ln 3) -> omega = (0.25, 0.75).
    let m = mk(0.0, 3.0f64.ln());
    let w = importance_weights(&d, &m.w_iv, m.anchor.as_ref().unwrap()).unwrap();
    assert!((w[0] - 0.25).abs() < 1e-12);
    assert!((w[1] - 0.75).abs() < 1e-12);
    // Adding a constant to every delta leaves omega unchanged.
    let shifted = mk(7.0, 7.0 + 3.0f64.ln());
    let w2 = importance_weights(&d, &shifted.w_iv, shifted.anchor.as_ref().unwrap()).unwrap();
    for (a, b) in w.iter().zip(&w2) {
        assert!((a - b).abs() < 1e-12);
    }
    // Weights sum to one over occurrences.
    let m = random_model(Variant::Dcbow2, 6, 9, 3, 5);
    let d = doc("b", &[(1, 3), (4, 2), (8, 1)], &[0]);
    let w = importance_weights(&d, &m.w_iv, m.anchor.as_ref().unwrap()).unwrap();
    let total: f64 = w.iter().sum();
    assert!((total - 1.0).abs() < 1e-9);
    assert!(w.iter().all(|&x| x >= 0.0));
}

#[test]
fn dcbow2_equals_dcbow_under_zero_anchor() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let model = zero_model(Variant::Dcbow2, 8, 30, 4);
    for i in 0..100 {
        let n_terms = rng.random_range(1..10usize);
        let mut bag = std::collections::BTreeMap::new();
        for _ in 0..n_terms {
            *bag.entry(rng.random_range(0..30u32)).or_insert(0u32) += rng.random_range(1..4u32);
        }
        let d = doc(&format!("d{i}"), &bag.into_iter().collect::<Vec<_>>(), &[0]);
        let c1 = context_dcbow(&d, &model.w_iv).unwrap();
        let c2 = context_dcbow2(&d, &model.w_iv, model.anchor.as_ref().unwrap()).unwrap();
        for (a, b) in c1.iter().zip(&c2) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn dcbow2_and_dcbow_rank_identically_with_shared_output_parameters() {
    let base = random_model(Variant::Dcbow, 8, 30, 6, 21);
    let mut anchored = base.clone();
    anchored.variant = Variant::Dcbow2;
    anchored.anchor = Some(vec![0.0; 8]);
    let d = doc("x", &[(0, 2), (7, 1), (12, 3), (25, 1)], &[0]);
    let ra = base.rank_oov_pns(&d);
    let rb = anchored.rank_oov_pns(&d);
    let oa: Vec<u32> = ra.entries.iter().map(|&(i, _)| i).collect();
    let ob: Vec<u32> = rb.entries.iter().map(|&(i, _)| i).collect();
    assert_eq!(oa, ob);
}

#[test]
fn dcbow2_concentrates_on_strongly_anchored_token() {
    let mut model = random_model(Variant::Dcbow2, 8, 20, 4, 3);
    let d = doc("a", &[(2, 1), (5, 2), (11, 1), (17, 1)], &[0]);
    // The max-norm term wins the anchor alignment by Cauchy-Schwarz.
    let j = [2u32, 5, 11, 17]
        .into_iter()
        .max_by(|&a, &b| {
            norm(model.w_iv.row(a as usize))
                .partial_cmp(&norm(model.w_iv.row(b as usize)))
                .unwrap()
        })
        .unwrap();
    let v = model.w_iv.row(j as usize).to_vec();
    let n = norm(&v);
    model.anchor = Some(v.iter().map(|x| 50.0 * x / n).collect());
    let c = context_dcbow2(&d, &model.w_iv, model.anchor.as_ref().unwrap()).unwrap();
    for (ci, vi) in c.iter().zip(&v) {
        assert!((ci - vi).abs() < 1e-6, "context should collapse to the anchored token");
    }
    // A single-token document collapses regardless of anchor.
    let single = doc("s", &[(3, 2)], &[0]);
    let c = context_dcbow2(&single, &model.w_iv, model.anchor.as_ref().unwrap()).unwrap();
    assert_eq!(c, model.w_iv.row(3));
}

#[test]
fn plus_context_concatenates_in_fixed_order() {
    let model = random_model(Variant::Dcbow2Plus, 5, 12, 3, 9);
    let d = doc("a", &[(1, 2), (4, 1), (9, 1)], &[0]);
    let anchor = model.anchor.as_ref().unwrap();
    let c = context_plus(&d, &model.w_iv, anchor).unwrap();
    assert_eq!(c.len(), 10);
    assert_eq!(&c[..5], context_dcbow(&d, &model.w_iv).unwrap().as_slice());
    assert_eq!(
        &c[5..],
        context_dcbow2(&d, &model.w_iv, anchor).unwrap().as_slice()
    );
    // First K components do not depend on the anchor.
    let other = context_plus(&d, &model.w_iv, &vec![9.0; 5]).unwrap();
    assert_eq!(&c[..5], &other[..5]);
    // Zero anchor: both halves equal.
    let z = context_plus(&d, &model.w_iv, &vec![0.0; 5]).unwrap();
    for i in 0..5 {
        assert!((z[i] - z[5 + i]).abs() < 1e-12);
    }
}

#[test]
fn output_distribution_analytic_cases() {
    let mut model = zero_model(Variant::Dcbow, 4, 6, 3);
    let d = doc("a", &[(0, 1), (2, 2)], &[0]);
    let c = model.context(&d).unwrap();
    // Zero parameters: uniform.
    let p = model.output_distribution(&c).unwrap();
    for pi in &p {
        assert!((pi - 1.0 / 3.0).abs() < 1e-12);
    }
    // b = (ln 1, ln 2, ln 3), W = 0 -> (1/6, 2/6, 3/6).
    model.b_oov = vec![1.0f64.ln(), 2.0f64.ln(), 3.0f64.ln()];
    let p = model.output_distribution(&c).unwrap();
    assert!((p[0] - 1.0 / 6.0).abs() < 1e-12);
    assert!((p[1] - 2.0 / 6.0).abs() < 1e-12);
    assert!((p[2] - 3.0 / 6.0).abs() < 1e-12);
    // Random parameters still normalize.
    let model = random_model(Variant::Dcbow2Plus, 4, 6, 5, 77);
    let c = model.context(&d).unwrap();
    let p = model.output_distribution(&c).unwrap();
    let total: f64 = p.iter().sum();
    assert!((total - 1.0).abs() < 1e-9);
    // Dimension mismatch errors.
    assert!(model.output_distribution(&[0.0; 3]).is_err());
}

#[test]
fn uniform_model_loss_is_log_vocab_size() {
    let d = doc("a", &[(0, 1), (3, 2), (5, 1)], &[2]);
    for variant in [Variant::Dcbow, Variant::Dcbow2, Variant::Dcbow2Plus] {
        let model = zero_model(variant, 6, 8, 5);
        let (loss, _) = loss_and_gradients(&model, &d, 2, Phase::FreezeIv).unwrap();
        assert!(
            (loss - 5.0f64.ln()).abs() < 1e-9,
            "{variant:?}: loss {loss} != ln 5"
        );
    }
}

fn fd_loss(model: &ContextModel, d: &Document, target: u32) -> f64 {
    loss_and_gradients(model, d, target, Phase::FreezeIv).unwrap().0
}

fn check_block(
    name: &str,
    model: &ContextModel,
    d: &Document,
    target: u32,
    analytic: &[f64],
    mut set: impl FnMut(&mut ContextModel, usize, f64),
    get: impl Fn(&ContextModel, usize) -> f64,
) {
    let h = 1e-5;
    let mut m = model.clone();
    for i in 0..analytic.len() {
        let orig = get(&m, i);
        set(&mut m, i, orig + h);
        let up = fd_loss(&m, d, target);
        set(&mut m, i, orig - h);
        let down = fd_loss(&m, d, target);
        set(&mut m, i, orig);
        let numeric = (up - down) / (2.0 * h);
        let denom = analytic[i].abs().max(numeric.abs()).max(1e-8);
        let rel = (analytic[i] - numeric).abs() / denom;
        assert!(
            rel < 1e-4,
            "{name}[{i}]: analytic {} vs numeric {numeric} (rel {rel})",
            analytic[i]
        );
    }
}

/// Every gradient component against central finite differences, all three
/// variants, both phases, on a random small model (K=8, 20 IV terms,
/// 5 OOV PNs).
#[test]
fn gradients_match_finite_differences_for_all_variants_and_phases() {
    let d = doc("a", &[(0, 2), (3, 1), (7, 3), (12, 1), (19, 2)], &[2]);
    let target = 2u32;
    for (vi, variant) in [Variant::Dcbow, Variant::Dcbow2, Variant::Dcbow2Plus]
        .into_iter()
        .enumerate()
    {
        for phase in [Phase::FreezeIv, Phase::Full] {
            let model = random_model(variant, 8, 20, 5, 100 + vi as u64);
            let (_, g) = loss_and_gradients(&model, &d, target, phase).unwrap();

            if phase == Phase::FreezeIv {
                assert!(
                    g.w_iv.data().iter().all(|&x| x == 0.0),
                    "{variant:?}: frozen phase must zero the input gradient"
                );
            } else {
                check_block(
                    "w_iv",
                    &model,
                    &d,
                    target,
                    g.w_iv.data(),
                    |m, i, v| m.w_iv.data_mut()[i] = v,
                    |m, i| m.w_iv.data()[i],
                );
            }

            check_block(
                "w_oov",
                &model,
                &d,
                target,
                g.w_oov.data(),
                |m, i, v| m.w_oov.data_mut()[i] = v,
                |m, i| m.w_oov.data()[i],
            );
            check_block(
                "b_oov",
                &model,
                &d,
                target,
                &g.b_oov,
                |m, i, v| m.b_oov[i] = v,
                |m, i| m.b_oov[i],
            );
            if let Some(ga) = &g.anchor {
                check_block(
                    "anchor",
                    &model,
                    &d,
                    target,
                    ga,
                    |m, i, v| m.anchor.as_mut().unwrap()[i] = v,
                    |m, i| m.anchor.as_ref().unwrap()[i],
                );
            }
        }
    }
}

#[test]
fn rank_oov_pns_cases() {
    // Zero parameters: all scores tie, index order.
    let model = zero_model(Variant::Dcbow, 4, 6, 5);
    let d = doc("a", &[(0, 1), (2, 1)], &[1]);
    let list = model.rank_oov_pns(&d);
    let order: Vec<u32> = list.entries.iter().map(|&(i, _)| i).collect();
    assert_eq!(order, vec![0, 1, 2, 3, 4]);
    assert!(!list.is_degenerate());

    // Bias toward PN 3 puts it first.
    let mut biased = zero_model(Variant::Dcbow, 4, 6, 5);
    biased.b_oov[3] = 2.0;
    assert_eq!(biased.rank_oov_pns(&d).entries[0].0, 3);

    // Adding a constant to every bias leaves the ranking unchanged.
    let model = random_model(Variant::Dcbow, 4, 6, 5, 8);
    let mut shifted = model.clone();
    for b in shifted.b_oov.iter_mut() {
        *b += 3.7;
    }
    let oa: Vec<u32> = model.rank_oov_pns(&d).entries.iter().map(|&(i, _)| i).collect();
    let ob: Vec<u32> = shifted.rank_oov_pns(&d).entries.iter().map(|&(i, _)| i).collect();
    assert_eq!(oa, ob);

    // A document with no encodable tokens gets a flagged uniform ranking.
    let empty = doc("e", &[], &[1]);
    let list = model.rank_oov_pns(&empty);
    assert!(list.is_degenerate());
    let order: Vec<u32> = list.entries.iter().map(|&(i, _)| i).collect();
    assert_eq!(order, vec![0, 1, 2, 3, 4]);
}

#[test]
fn validation_error_cases() {
    // A model whose argmax always hits: bias the target of every doc.
    let mut model = zero_model(Variant::Dcbow, 4, 6, 5);
    model.b_oov[2] = 5.0;
    let docs = vec![doc("a", &[(0, 1)], &[2]), doc("b", &[(1, 2)], &[2, 4])];
    assert_eq!(validation_error(&model, &docs).unwrap(), 0.0);

    // Uniform model ties break to index 0: error is 1 unless 0 is a target.
    let uniform = zero_model(Variant::Dcbow, 4, 6, 5);
    let docs = vec![doc("a", &[(0, 1)], &[4])];
    assert_eq!(validation_error(&uniform, &docs).unwrap(), 1.0);
    let docs = vec![doc("a", &[(0, 1)], &[0, 4])];
    assert_eq!(validation_error(&uniform, &docs).unwrap(), 0.0);

    // Contract errors.
    assert!(validation_error(&uniform, &[]).is_err());
    let untargeted = vec![doc("a", &[(0, 1)], &[])];
    assert!(validation_error(&uniform, &untargeted).is_err());
}

/// Monte Carlo: a random model against independently random targets hits
/// with probability exactly 1/n_oov, so the error concentrates at 1 - 1/n.
#[test]
fn validation_error_of_random_model_matches_chance() {
    let n_oov = 10usize;
    let trials = 4000usize;
    let model = random_model(Variant::Dcbow, 8, 30, n_oov, 1806);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut docs = Vec::with_capacity(trials);
    for i in 0..trials {
        let mut bag = std::collections::BTreeMap::new();
        for _ in 0..rng.random_range(3..10usize) {
            *bag.entry(rng.random_range(0..30u32)).or_insert(0u32) += 1;
        }
        let target = rng.random_range(0..n_oov as u32);
        docs.push(doc(&format!("d{i}"), &bag.into_iter().collect::<Vec<_>>(), &[target]));
    }
    let err = validation_error(&model, &docs).unwrap();
    let p = 1.0 - 1.0 / n_oov as f64;
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    assert!(
        (err - p).abs() <= 3.0 * sigma,
        "error {err} vs expected {p} (3 sigma = {})",
        3.0 * sigma
    );
}


#[test]
fn extract_keywords_threshold_cases() {
    // Zero anchor, 20 occurrences: every weight is 0.05, nothing crosses 0.1.
    let model = zero_model(Variant::Dcbow2, 4, 25, 3);
    let bag: Vec<(u32, u32)> = (0..20).map(|i| (i, 1)).collect();
    let d = doc("a", &bag, &[0]);
    assert!(model.extract_keywords(&d, 0.1).unwrap().is_empty());

    // Five occurrences: weights 0.2 > 0.1, all five reported.
    let bag: Vec<(u32, u32)> = (0..5).map(|i| (i, 1)).collect();
    let d = doc("b", &bag, &[0]);
    let kws = model.extract_keywords(&d, 0.1).unwrap();
    assert_eq!(kws.len(), 5);
    for &(_, w) in &kws {
        assert!((w - 0.2).abs() < 1e-12);
    }

    // Strict threshold: weight exactly at the threshold is excluded.
    let kws = model.extract_keywords(&d, 0.2).unwrap();
    assert!(kws.is_empty());

    // Repeated occurrences of one term sum before thresholding.
    let d = doc("c", &[(0, 3), (1, 1), (2, 1)], &[0]);
    let kws = model.extract_keywords(&d, 0.5).unwrap();
    assert_eq!(kws.len(), 1);
    assert_eq!(kws[0].0, 0);
    assert!((kws[0].1 - 0.6).abs() < 1e-12);

    // The uniform-bag variant has no importance layer.
    let plain = zero_model(Variant::Dcbow, 4, 25, 3);
    assert!(plain.extract_keywords(&d, 0.1).is_err());
}

fn tiny_training_setup(seed: u64) -> (Vec<Document>, Vec<Document>, EmbeddingMatrix) {
    // Two artificial topics: terms 0..10 co-occur with PNs {0,1}, terms
    // 10..20 with PNs {2,3}.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut valid = Vec::new();
    for i in 0..60 {
        let topic = i % 2;
        let mut bag = std::collections::BTreeMap::new();
        for _ in 0..rng.random_range(6..12usize) {
            let t = rng.random_range(0..10u32) + 10 * topic as u32;
            *bag.entry(t).or_insert(0u32) += 1;
        }
        let target = 2 * topic as u32 + rng.random_range(0..2u32);
        let d = doc(&format!("d{i}"), &bag.into_iter().collect::<Vec<_>>(), &[target]);
        if i < 44 {
            train.push(d);
        } else {
            valid.push(d);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
    let emb = EmbeddingMatrix::new(
        Side::Iv,
        Mat::from_fn(20, 8, |_, _| rng.random_range(-0.3..0.3)),
    )
    .unwrap();
    (train, valid, emb)
}

#[test]
fn phase1_keeps_input_embeddings_bit_identical() {
    let (train, valid, emb) = tiny_training_setup(3);
    let config = TrainConfig {
        max_epochs_per_phase: 6,
        eval_every: 2,
        ..TrainConfig::default()
    };
    for variant in [Variant::Dcbow, Variant::Dcbow2, Variant::Dcbow2Plus] {
        let (model, history) =
            train_two_phase_phase1_only(&train, &valid, &emb, variant, 4, &config);
        for (a, b) in model.w_iv.data().iter().zip(emb.mat().data()) {
            assert_eq!(a.to_bits(), b.to_bits(), "{variant:?}");
        }
        assert!(history.records.iter().all(|r| r.phase == 1));
    }
}

fn train_two_phase_phase1_only(
    train: &[Document],
    valid: &[Document],
    emb: &EmbeddingMatrix,
    variant: Variant,
    n_oov: usize,
    config: &TrainConfig,
) -> (ContextModel, TrainHistory) {
    super::train::train_phase1(train, valid, emb, variant, n_oov, config).unwrap()
}

#[test]
fn two_phase_training_improves_and_is_deterministic() {
    let (train, valid, emb) = tiny_training_setup(7);
    let config = TrainConfig {
        max_epochs_per_phase: 10,
        eval_every: 2,
        batch_size: 16,
        ..TrainConfig::default()
    };
    for variant in [Variant::Dcbow, Variant::Dcbow2, Variant::Dcbow2Plus] {
        let (model, history) =
            train_two_phase(&train, &valid, &emb, variant, 4, &config).unwrap();
        let final_err = validation_error(&model, &valid).unwrap();
        let initial_err = history.records[0].validation_error;
        assert!(
            final_err <= initial_err,
            "{variant:?}: best checkpoint {final_err} worse than initialization {initial_err}"
        );
        assert!(history.phase_boundary > 0);
        assert!(history.records[history.phase_boundary].phase == 2);

        let (model2, history2) =
            train_two_phase(&train, &valid, &emb, variant, 4, &config).unwrap();
        assert_eq!(model, model2);
        assert_eq!(history, history2);
    }
}

#[test]
fn training_rejects_missing_pairs() {
    let (train, valid, emb) = tiny_training_setup(9);
    let config = TrainConfig::default();
    // No targets anywhere.
    let untargeted: Vec<Document> = train
        .iter()
        .map(|d| Document {
            oov_bag: vec![],
            ..d.clone()
        })
        .collect();
    assert!(train_two_phase(&untargeted, &valid, &emb, Variant::Dcbow, 4, &config).is_err());
    // No usable validation documents.
    let unusable: Vec<Document> = valid
        .iter()
        .map(|d| Document {
            iv_bag: vec![],
            ..d.clone()
        })
        .collect();
    assert!(train_two_phase(&train, &unusable, &emb, Variant::Dcbow, 4, &config).is_err());
}

#[test]
fn history_csv_has_header_and_boundary_marker() {
    let (train, valid, emb) = tiny_training_setup(11);
    let config = TrainConfig {
        max_epochs_per_phase: 3,
        eval_every: 2,
        batch_size: 16,
        ..TrainConfig::default()
    };
    let (_, history) = train_two_phase(&train, &valid, &emb, Variant::Dcbow2, 4, &config).unwrap();
    let csv = history.to_csv();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "phase,epoch,batch,validation_error,training_loss"
    );
    assert!(csv.lines().any(|l| l == "boundary,,,,"));
    // Phase-initial rows carry no training loss.
    let first = csv.lines().nth(1).unwrap();
    assert!(first.starts_with("1,0,0,"));
    assert!(first.ends_with(','));
}

#[test]
fn model_round_trips_bit_exactly_through_the_container() {
    let dir = tempfile::tempdir().unwrap();
    for variant in [Variant::Dcbow, Variant::Dcbow2Plus] {
        let model = random_model(variant, 5, 7, 4, 55);
        let path = dir.path().join(format!("{}.json", variant.name()));
        let meta = crate::io::FileMeta::new("hash", 9);
        crate::io::save_model(&path, &meta, &model).unwrap();
        let (meta2, loaded): (crate::io::FileMeta, ContextModel) =
            crate::io::load_model(&path).unwrap();
        assert_eq!(meta, meta2);
        assert_eq!(model.variant, loaded.variant);
        for (a, b) in model.w_iv.data().iter().zip(loaded.w_iv.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in model.w_oov.data().iter().zip(loaded.w_oov.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(model.b_oov, loaded.b_oov);
        assert_eq!(model.anchor, loaded.anchor);
    }
}
