//! Two-phase training with validation-error early stopping.
//!
//! Training examples are (document, target OOV PN) pairs with softmax
//! cross-entropy. Phase 1 trains the output layer (and anchor) with the
//! input embeddings frozen at their pre-trained values; phase 2 unfreezes
//! everything. Each phase early-stops on the validation classification
//! error — whether a target PN gets the highest output probability — and
//! retains the best-scoring parameter snapshot.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::embeddings::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::matrix::{axpy, dot, log_sum_exp, Mat};

use super::{context_dcbow, term_importance, ContextModel, Variant};

/// Which parameters move during a training phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Output layer and anchor only; `w_iv` gradients are identically zero.
    FreezeIv,
    /// Everything, including the input embeddings.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr_phase1: f64,
    pub lr_phase2: f64,
    pub batch_size: usize,
    pub max_epochs_per_phase: usize,
    pub patience_phase1: usize,
    pub patience_phase2: usize,
    /// Batches between validation evaluations.
    pub eval_every: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr_phase1: 0.05,
            lr_phase2: 0.01,
            batch_size: 64,
            max_epochs_per_phase: 400,
            patience_phase1: 5,
            patience_phase2: 3,
            eval_every: 64,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.eval_every == 0 || self.max_epochs_per_phase == 0 {
            return Err(Error::invalid(
                "train config: batch_size, eval_every and max_epochs_per_phase must be positive",
            ));
        }
        if self.patience_phase1 == 0 || self.patience_phase2 == 0 {
            return Err(Error::invalid("train config: patience must be at least 1"));
        }
        if self.lr_phase1 <= 0.0 || self.lr_phase2 <= 0.0 {
            return Err(Error::invalid("train config: learning rates must be positive"));
        }
        Ok(())
    }
}

/// One validation evaluation during training. `training_loss` is the mean
/// batch loss since the previous evaluation (absent on phase-initial rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub phase: u8,
    pub epoch: usize,
    pub batch: u64,
    pub validation_error: f64,
    pub training_loss: Option<f64>,
}

/// Every evaluation made while training, in order; `phase_boundary` indexes
/// the first phase-2 record.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainHistory {
    pub records: Vec<EvalRecord>,
    pub phase_boundary: usize,
}

impl TrainHistory {
    /// `phase,epoch,batch,validation_error,training_loss` rows with a
    /// marker row at the phase boundary.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("phase,epoch,batch,validation_error,training_loss\n");
        for (i, r) in self.records.iter().enumerate() {
            if i == self.phase_boundary && i > 0 {
                s.push_str("boundary,,,,\n");
            }
            let loss = r
                .training_loss
                .map(|l| l.to_string())
                .unwrap_or_default();
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.phase, r.epoch, r.batch, r.validation_error, loss
            ));
        }
        s
    }
}

/// Gradients of the per-example loss for every parameter block. The
/// `w_iv` block is identically zero in the frozen phase.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub w_iv: Mat,
    pub w_oov: Mat,
    pub b_oov: Vec<f64>,
    pub anchor: Option<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(model: &ContextModel) -> Self {
        Gradients {
            w_iv: Mat::zeros(model.w_iv.rows(), model.w_iv.cols()),
            w_oov: Mat::zeros(model.w_oov.rows(), model.w_oov.cols()),
            b_oov: vec![0.0; model.b_oov.len()],
            anchor: model.anchor.as_ref().map(|a| vec![0.0; a.len()]),
        }
    }
}

/// Loss `-ln p(target | c_d)` and its gradients for one training pair.
pub fn loss_and_gradients(
    model: &ContextModel,
    doc: &Document,
    target: u32,
    phase: Phase,
) -> Result<(f64, Gradients)> {
    let mut acc = Gradients::zeros_like(model);
    let loss = accumulate_gradients(model, doc, target, phase, 1.0, &mut acc)?;
    Ok((loss, acc))
}

/// Backpropagate one example into an accumulator, gradients scaled by
/// `scale` (1/batch for mini-batch means). Returns the unscaled loss.
pub(crate) fn accumulate_gradients(
    model: &ContextModel,
    doc: &Document,
    target: u32,
    phase: Phase,
    scale: f64,
    acc: &mut Gradients,
) -> Result<f64> {
    if target as usize >= model.n_oov() {
        return Err(Error::invalid(format!(
            "target index {target} outside OOV vocabulary of {}",
            model.n_oov()
        )));
    }
    let k = model.k;
    // Forward pass, keeping the importance weights for the backward pass.
    let importance = match model.variant {
        Variant::Dcbow => None,
        Variant::Dcbow2 | Variant::Dcbow2Plus => Some(term_importance(
            doc,
            &model.w_iv,
            model.anchor.as_ref().unwrap(),
        )?),
    };
    let context = match model.variant {
        Variant::Dcbow => context_dcbow(doc, &model.w_iv)?,
        Variant::Dcbow2 => weighted_context(importance.as_ref().unwrap(), &model.w_iv, k),
        Variant::Dcbow2Plus => {
            let mut c = context_dcbow(doc, &model.w_iv)?;
            c.extend(weighted_context(importance.as_ref().unwrap(), &model.w_iv, k));
            c
        }
    };
    let logits: Vec<f64> = (0..model.n_oov())
        .map(|i| dot(model.w_oov.row(i), &context) + model.b_oov[i])
        .collect();
    let log_z = log_sum_exp(&logits);
    let loss = log_z - logits[target as usize];

    // Output layer: dz = scale * (p - onehot).
    let mut d_context = vec![0.0; context.len()];
    for i in 0..model.n_oov() {
        let p = (logits[i] - log_z).exp();
        let y = f64::from(i == target as usize);
        let dz = scale * (p - y);
        acc.b_oov[i] += dz;
        axpy(acc.w_oov.row_mut(i), dz, &context);
        axpy(&mut d_context, dz, model.w_oov.row(i));
    }

    // Input side. The mean path sees the first K context components, the
    // weighted path the last K (they coincide for the single-bag variants).
    match model.variant {
        Variant::Dcbow => {
            if phase == Phase::Full {
                backprop_mean(doc, &d_context[..k], &mut acc.w_iv);
            }
        }
        Variant::Dcbow2 => {
            backprop_weighted(
                importance.as_ref().unwrap(),
                &d_context[..k],
                model,
                phase,
                acc,
            );
        }
        Variant::Dcbow2Plus => {
            if phase == Phase::Full {
                backprop_mean(doc, &d_context[..k], &mut acc.w_iv);
            }
            backprop_weighted(
                importance.as_ref().unwrap(),
                &d_context[k..],
                model,
                phase,
                acc,
            );
        }
    }
    Ok(loss)
}

fn weighted_context(importance: &[(u32, u32, f64)], w_iv: &Mat, k: usize) -> Vec<f64> {
    let mut c = vec![0.0; k];
    for &(term, count, w) in importance {
        axpy(&mut c, count as f64 * w, w_iv.row(term as usize));
    }
    c
}

/// d c_mean / d w_v = count_v / N_d per component.
fn backprop_mean(doc: &Document, g: &[f64], d_w_iv: &mut Mat) {
    let n = doc.n_iv_tokens() as f64;
    for &(term, count) in &doc.iv_bag {
        axpy(d_w_iv.row_mut(term as usize), count as f64 / n, g);
    }
}

/// Backward through c = sum_j omega_j w_j with omega = softmax of anchor
/// dot products. For term v with count c_v and per-occurrence weight w_v:
///   s_v     = g . w_iv[v]
///   S       = sum_v c_v w_v s_v
///   d_delta = w_v (s_v - S)            (per occurrence)
///   d_anchor += c_v d_delta w_iv[v]
///   d_w_iv[v] += c_v w_v g + c_v d_delta anchor   (only when unfrozen)
fn backprop_weighted(
    importance: &[(u32, u32, f64)],
    g: &[f64],
    model: &ContextModel,
    phase: Phase,
    acc: &mut Gradients,
) {
    let anchor = model.anchor.as_ref().unwrap();
    let scores: Vec<f64> = importance
        .iter()
        .map(|&(term, _, _)| dot(g, model.w_iv.row(term as usize)))
        .collect();
    let s_bar: f64 = importance
        .iter()
        .zip(&scores)
        .map(|(&(_, count, w), &s)| count as f64 * w * s)
        .sum();
    let d_anchor = acc.anchor.as_mut().unwrap();
    for (&(term, count, w), &s) in importance.iter().zip(&scores) {
        let d_delta = w * (s - s_bar);
        axpy(d_anchor, count as f64 * d_delta, model.w_iv.row(term as usize));
        if phase == Phase::Full {
            let row = acc.w_iv.row_mut(term as usize);
            axpy(row, count as f64 * w, g);
            axpy(row, count as f64 * d_delta, anchor);
        }
    }
}

fn apply_sgd(model: &mut ContextModel, g: &Gradients, lr: f64, phase: Phase) {
    if phase == Phase::Full {
        axpy(model.w_iv.data_mut(), -lr, g.w_iv.data());
    }
    axpy(model.w_oov.data_mut(), -lr, g.w_oov.data());
    axpy(&mut model.b_oov, -lr, &g.b_oov);
    if let (Some(a), Some(ga)) = (model.anchor.as_mut(), g.anchor.as_ref()) {
        axpy(a, -lr, ga);
    }
}

/// Fraction of validation documents whose output argmax (ties resolved to
/// the lowest index) is not among the document's targets.
pub fn validation_error(model: &ContextModel, valid_docs: &[Document]) -> Result<f64> {
    if valid_docs.is_empty() {
        return Err(Error::invalid("validation_error: empty validation set"));
    }
    let mut wrong = 0usize;
    for doc in valid_docs {
        if !doc.has_targets() {
            return Err(Error::invalid(format!(
                "validation document `{}` has no targets",
                doc.id
            )));
        }
        let context = model.context(doc)?;
        let probs = model.output_distribution(&context)?;
        let mut best = 0usize;
        for (i, &p) in probs.iter().enumerate().skip(1) {
            if p > probs[best] {
                best = i;
            }
        }
        if !doc.targets().any(|t| t as usize == best) {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / valid_docs.len() as f64)
}

fn training_pairs(train_docs: &[Document]) -> Vec<(usize, u32)> {
    train_docs
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.iv_bag.is_empty())
        .flat_map(|(i, d)| d.targets().map(move |t| (i, t)).collect::<Vec<_>>())
        .collect()
}

fn usable_validation(valid_docs: &[Document]) -> Vec<Document> {
    valid_docs
        .iter()
        .filter(|d| d.has_targets() && !d.iv_bag.is_empty())
        .cloned()
        .collect()
}

fn run_phase(
    model: &mut ContextModel,
    phase: Phase,
    phase_no: u8,
    pairs: &[(usize, u32)],
    train_docs: &[Document],
    valid_docs: &[Document],
    lr: f64,
    patience: usize,
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
    history: &mut TrainHistory,
) -> Result<()> {
    let initial = validation_error(model, valid_docs)?;
    history.records.push(EvalRecord {
        phase: phase_no,
        epoch: 0,
        batch: 0,
        validation_error: initial,
        training_loss: None,
    });
    let mut best_err = initial;
    let mut best_model = model.clone();
    let mut stale = 0usize;
    let mut batches = 0u64;
    let mut loss_sum = 0.0;
    let mut loss_batches = 0usize;
    let mut order: Vec<usize> = (0..pairs.len()).collect();

    'phase: for epoch in 1..=config.max_epochs_per_phase {
        order.shuffle(rng);
        for chunk in order.chunks(config.batch_size) {
            // Batch gradients are summed (one lr-sized step per example,
            // applied at batch cadence), the regime the lr defaults assume.
            let mut grads = Gradients::zeros_like(model);
            let mut batch_loss = 0.0;
            for &pi in chunk {
                let (d, t) = pairs[pi];
                batch_loss +=
                    accumulate_gradients(model, &train_docs[d], t, phase, 1.0, &mut grads)?;
            }
            apply_sgd(model, &grads, lr, phase);
            batches += 1;
            loss_sum += batch_loss / chunk.len() as f64;
            loss_batches += 1;

            if batches % config.eval_every as u64 == 0 {
                let err = validation_error(model, valid_docs)?;
                history.records.push(EvalRecord {
                    phase: phase_no,
                    epoch,
                    batch: batches,
                    validation_error: err,
                    training_loss: Some(loss_sum / loss_batches as f64),
                });
                loss_sum = 0.0;
                loss_batches = 0;
                if err < best_err {
                    best_err = err;
                    best_model = model.clone();
                    stale = 0;
                } else {
                    stale += 1;
                    if stale >= patience {
                        break 'phase;
                    }
                }
            }
        }
    }
    *model = best_model;
    Ok(())
}

/// Two-phase training from pre-trained input embeddings. Returns the model
/// holding the best-validation parameters of phase 2 (phase 2 starts from
/// the phase-1 best, so its initial evaluation is included) together with
/// the full evaluation history.
pub fn train_two_phase(
    train_docs: &[Document],
    valid_docs: &[Document],
    pretrained: &EmbeddingMatrix,
    variant: Variant,
    n_oov: usize,
    config: &TrainConfig,
) -> Result<(ContextModel, TrainHistory)> {
    let (mut model, mut history, pairs, valid) =
        setup(train_docs, valid_docs, pretrained, variant, n_oov, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
    run_phase(
        &mut model,
        Phase::FreezeIv,
        1,
        &pairs,
        train_docs,
        &valid,
        config.lr_phase1,
        config.patience_phase1,
        config,
        &mut rng,
        &mut history,
    )?;
    history.phase_boundary = history.records.len();
    run_phase(
        &mut model,
        Phase::Full,
        2,
        &pairs,
        train_docs,
        &valid,
        config.lr_phase2,
        config.patience_phase2,
        config,
        &mut rng,
        &mut history,
    )?;
    Ok((model, history))
}

/// Phase 1 alone: output layer and anchor trained over frozen input
/// embeddings. This is the stage the first-phase retrieval figures use,
/// and the freeze contract is directly checkable on its result.
pub fn train_phase1(
    train_docs: &[Document],
    valid_docs: &[Document],
    pretrained: &EmbeddingMatrix,
    variant: Variant,
    n_oov: usize,
    config: &TrainConfig,
) -> Result<(ContextModel, TrainHistory)> {
    let (mut model, mut history, pairs, valid) =
        setup(train_docs, valid_docs, pretrained, variant, n_oov, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
    run_phase(
        &mut model,
        Phase::FreezeIv,
        1,
        &pairs,
        train_docs,
        &valid,
        config.lr_phase1,
        config.patience_phase1,
        config,
        &mut rng,
        &mut history,
    )?;
    history.phase_boundary = history.records.len();
    Ok((model, history))
}

#[allow(clippy::type_complexity)]
fn setup(
    train_docs: &[Document],
    valid_docs: &[Document],
    pretrained: &EmbeddingMatrix,
    variant: Variant,
    n_oov: usize,
    config: &TrainConfig,
) -> Result<(ContextModel, TrainHistory, Vec<(usize, u32)>, Vec<Document>)> {
    config.validate()?;
    let pairs = training_pairs(train_docs);
    if pairs.is_empty() {
        return Err(Error::invalid(
            "no training pairs: no document has both IV tokens and targets",
        ));
    }
    if let Some(&(_, bad)) = pairs.iter().find(|&&(_, t)| t as usize >= n_oov) {
        return Err(Error::invalid(format!(
            "target index {bad} outside OOV vocabulary of {n_oov}"
        )));
    }
    let valid = usable_validation(valid_docs);
    if valid.is_empty() {
        return Err(Error::invalid(
            "no validation pairs: no validation document has both IV tokens and targets",
        ));
    }
    let model = ContextModel::init(variant, pretrained, n_oov, "", "", config.seed)?;
    Ok((model, TrainHistory::default(), pairs, valid))
}
