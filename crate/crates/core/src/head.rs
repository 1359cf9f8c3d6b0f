//! Sigmoid classification head over frozen embeddings.
//!
//! Training minimizes class-weighted binary cross-entropy with Adam on
//! seeded mini-batches, keeps the best-validation-loss epoch, and supports
//! sequential source-then-target transfer.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Severity;
use crate::error::{Error, Result};
use crate::eval::ConfusionCounts;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;
/// Probabilities are clamped to `[PROB_CLAMP, 1 - PROB_CLAMP]`.
pub const PROB_CLAMP: f64 = 1e-12;

/// An embedding with its binary label.
pub type Sample = (Vec<f64>, Severity);

#[derive(Debug, Clone, PartialEq)]
pub struct HeadModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl HeadModel {
    pub fn zeros(dim: usize) -> HeadModel {
        HeadModel { weights: vec![0.0; dim], bias: 0.0 }
    }

    /// Uniform in `[-1/sqrt(dim), 1/sqrt(dim)]`, zero bias.
    pub fn random(dim: usize, rng: &mut impl Rng) -> HeadModel {
        let scale = 1.0 / libm::sqrt(dim.max(1) as f64);
        HeadModel {
            weights: (0..dim).map(|_| rng.random_range(-scale..=scale)).collect(),
            bias: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn is_finite(&self) -> bool {
        self.bias.is_finite() && self.weights.iter().all(|w| w.is_finite())
    }

    /// `w . x + b`; the ranking score used for evaluation.
    pub fn logit(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias)
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// `sigmoid(w . x + b)`, clamped into the open unit interval.
pub fn head_forward(model: &HeadModel, x: &[f64]) -> Result<f64> {
    Ok(sigmoid(model.logit(x)?).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP))
}

/// Inverse-frequency class weights `N / (2 * N_c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassWeights {
    pub low: f64,
    pub high: f64,
}

impl ClassWeights {
    pub fn balanced() -> ClassWeights {
        ClassWeights { low: 1.0, high: 1.0 }
    }

    pub fn from_labels(labels: impl IntoIterator<Item = Severity>) -> Result<ClassWeights> {
        let (mut n_low, mut n_high) = (0usize, 0usize);
        for l in labels {
            if l.is_high() {
                n_high += 1;
            } else {
                n_low += 1;
            }
        }
        if n_low == 0 || n_high == 0 {
            return Err(Error::SingleClass);
        }
        let n = (n_low + n_high) as f64;
        Ok(ClassWeights {
            low: n / (2.0 * n_low as f64),
            high: n / (2.0 * n_high as f64),
        })
    }

    pub fn get(&self, label: Severity) -> f64 {
        if label.is_high() {
            self.high
        } else {
            self.low
        }
    }
}

fn target(label: Severity) -> f64 {
    if label.is_high() {
        1.0
    } else {
        0.0
    }
}

/// Mean over the batch of `-w_y [y ln p + (1 - y) ln(1 - p)]`.
pub fn weighted_bce_loss<S: AsRef<[f64]>>(
    model: &HeadModel,
    batch: &[(S, Severity)],
    weights: &ClassWeights,
) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut total = 0.0;
    for (x, label) in batch {
        let p = head_forward(model, x.as_ref())?;
        let y = target(*label);
        total -= weights.get(*label) * (y * libm::log(p) + (1.0 - y) * libm::log(1.0 - p));
    }
    Ok(total / batch.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeadGradient {
    pub weights: Vec<f64>,
    pub bias: f64,
}

/// Analytic gradient of [`weighted_bce_loss`]: the batch mean of
/// `w_y (p - y) x` and `w_y (p - y)`.
pub fn bce_gradient<S: AsRef<[f64]>>(
    model: &HeadModel,
    batch: &[(S, Severity)],
    weights: &ClassWeights,
) -> Result<HeadGradient> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut grad = HeadGradient { weights: vec![0.0; model.dim()], bias: 0.0 };
    for (x, label) in batch {
        let x = x.as_ref();
        let residual = weights.get(*label) * (sigmoid(model.logit(x)?) - target(*label));
        for (g, v) in grad.weights.iter_mut().zip(x) {
            *g += residual * v;
        }
        grad.bias += residual;
    }
    let n = batch.len() as f64;
    for g in &mut grad.weights {
        *g /= n;
    }
    grad.bias /= n;
    Ok(grad)
}

/// First and second moment estimates, one slot per weight plus the bias
/// in the last slot.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
}

impl AdamState {
    pub fn new(dim: usize) -> AdamState {
        AdamState { m: vec![0.0; dim + 1], v: vec![0.0; dim + 1], step: 0 }
    }

    fn update(&mut self, model: &mut HeadModel, grad: &HeadGradient, lr: f64) {
        self.step += 1;
        let t = self.step as f64;
        let c1 = 1.0 - libm::pow(ADAM_BETA1, t);
        let c2 = 1.0 - libm::pow(ADAM_BETA2, t);
        let params = model.weights.iter_mut().chain(core::iter::once(&mut model.bias));
        let grads = grad.weights.iter().chain(core::iter::once(&grad.bias));
        for (((p, g), m), v) in params.zip(grads).zip(&mut self.m).zip(&mut self.v) {
            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= lr * m_hat / (libm::sqrt(v_hat) + ADAM_EPS);
        }
    }
}

/// One bias-corrected Adam update, returning the new state and model.
pub fn adam_step(state: &AdamState, model: &HeadModel, grad: &HeadGradient, lr: f64) -> Result<(AdamState, HeadModel)> {
    if state.m.len() != model.dim() + 1 || grad.weights.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: grad.weights.len() });
    }
    let mut state = state.clone();
    let mut model = model.clone();
    state.update(&mut model, grad, lr);
    Ok((state, model))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Stop after this many epochs without a validation-loss improvement.
    pub patience: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl TrainConfig {
    /// Source-stage learning rate.
    pub const SOURCE_LR: f64 = 1e-6;
    /// Target-stage learning rate used when continuing from a source model.
    pub const TARGET_LR: f64 = 1e-8;

    pub fn source_stage() -> TrainConfig {
        TrainConfig::default()
    }

    pub fn target_stage() -> TrainConfig {
        TrainConfig { learning_rate: TrainConfig::TARGET_LR, ..TrainConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning rate must be a non-negative finite number"));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1"));
        }
        if self.max_epochs == 0 {
            return Err(Error::InvalidConfig("max_epochs must be at least 1"));
        }
        Ok(())
    }
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            learning_rate: TrainConfig::SOURCE_LR,
            batch_size: 32,
            max_epochs: 200,
            patience: 10,
            restarts: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainLog {
    pub stage: String,
    pub restart: usize,
    pub seed: u64,
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    pub val_f1: Vec<f64>,
    /// 1-based epoch whose parameters were returned.
    pub selected_epoch: usize,
}

impl TrainLog {
    pub fn epochs(&self) -> usize {
        self.train_loss.len()
    }
}

/// Positive-class F1 at p > 0.5; 0 when undefined.
pub fn validation_f1(model: &HeadModel, val: &[Sample]) -> Result<f64> {
    let mut counts = ConfusionCounts::default();
    for (x, label) in val {
        counts.record(model.logit(x)? > 0.0, label.is_high());
    }
    Ok(counts.f1_binary().unwrap_or(0.0))
}

fn check_dims(sets: &[&[Sample]], dim: usize) -> Result<()> {
    for set in sets {
        for (x, _) in set.iter() {
            if x.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: x.len() });
            }
            if let Some(index) = x.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { index });
            }
        }
    }
    Ok(())
}

/// Mini-batch Adam with early stopping on validation loss. Starts from
/// `init` when given, otherwise from a seeded random head. Returns the
/// parameters of the best-validation-loss epoch.
pub fn train_head(
    train: &[Sample],
    val: &[Sample],
    cfg: &TrainConfig,
    init: Option<&HeadModel>,
) -> Result<(HeadModel, TrainLog)> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if val.is_empty() {
        return Err(Error::InvalidConfig("validation set is empty"));
    }
    let weights = ClassWeights::from_labels(train.iter().map(|(_, l)| *l))?;
    let dim = init.map_or(train[0].0.len(), HeadModel::dim);
    check_dims(&[train, val], dim)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = match init {
        Some(m) => m.clone(),
        None => HeadModel::random(dim, &mut rng),
    };
    let mut adam = AdamState::new(dim);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut log = TrainLog { seed: cfg.seed, ..TrainLog::default() };
    let mut best: Option<(f64, HeadModel)> = None;
    let mut batch: Vec<(&[f64], Severity)> = Vec::with_capacity(cfg.batch_size);

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| (train[i].0.as_slice(), train[i].1)));
            let grad = bce_gradient(&model, &batch, &weights)?;
            adam.update(&mut model, &grad, cfg.learning_rate);
        }
        if !model.is_finite() {
            return Err(Error::NonFinite { index: epoch });
        }
        let train_loss = weighted_bce_loss(&model, train, &weights)?;
        let val_loss = weighted_bce_loss(&model, val, &weights)?;
        log.train_loss.push(train_loss);
        log.val_loss.push(val_loss);
        log.val_f1.push(validation_f1(&model, val)?);

        match &best {
            Some((best_loss, _)) if val_loss >= *best_loss => {
                if epoch - log.selected_epoch >= cfg.patience {
                    break;
                }
            }
            _ => {
                best = Some((val_loss, model.clone()));
                log.selected_epoch = epoch;
            }
        }
    }
    let (_, best_model) = best.expect("at least one epoch ran");
    Ok((best_model, log))
}

/// Runs `cfg.restarts` independent trainings with seeds `seed, seed + 1, ...`.
pub fn train_head_restarts(
    train: &[Sample],
    val: &[Sample],
    cfg: &TrainConfig,
    init: Option<&HeadModel>,
) -> Result<Vec<(HeadModel, TrainLog)>> {
    cfg.validate()?;
    (0..cfg.restarts)
        .map(|r| {
            let run = TrainConfig { seed: cfg.seed.wrapping_add(r as u64), ..cfg.clone() };
            let (model, mut log) = train_head(train, val, &run, init)?;
            log.restart = r;
            Ok((model, log))
        })
        .collect()
}

/// Index and model with the highest validation F1; ties go to the lowest
/// restart index.
pub fn select_best_restart<'a>(results: &'a [(HeadModel, TrainLog)], val: &[Sample]) -> Result<(usize, &'a HeadModel)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, (model, _)) in results.iter().enumerate() {
        let f1 = validation_f1(model, val)?;
        if best.is_none_or(|(_, b)| f1 > b) {
            best = Some((i, f1));
        }
    }
    let (i, _) = best.ok_or(Error::NoResults)?;
    Ok((i, &results[i].0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferOutcome {
    pub model: HeadModel,
    pub source_log: TrainLog,
    pub target_log: TrainLog,
}

/// Trains on the source sets, then continues on the target sets from the
/// source model. Class weights are recomputed per stage.
pub fn transfer_train(
    source_train: &[Sample],
    source_val: &[Sample],
    target_train: &[Sample],
    target_val: &[Sample],
    cfg_source: &TrainConfig,
    cfg_target: &TrainConfig,
) -> Result<TransferOutcome> {
    let dim = source_train.first().map_or(0, |(x, _)| x.len());
    check_dims(&[source_val, target_train, target_val], dim)?;
    let stage = |stage: &'static str| move |e: Error| Error::Stage { stage, source: alloc::boxed::Box::new(e) };

    let (source_model, mut source_log) =
        train_head(source_train, source_val, cfg_source, None).map_err(stage("source"))?;
    source_log.stage = "source".into();
    let (model, mut target_log) =
        train_head(target_train, target_val, cfg_target, Some(&source_model)).map_err(stage("target"))?;
    target_log.stage = "target".into();
    Ok(TransferOutcome { model, source_log, target_log })
}

/// Restart-aware transfer: each stage runs its configured restarts and
/// keeps the run with the best validation F1 on that stage's data.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferRuns {
    pub model: HeadModel,
    pub source_logs: Vec<TrainLog>,
    pub source_best: usize,
    pub target_logs: Vec<TrainLog>,
    pub target_best: usize,
}

fn run_stage(
    stage: &'static str,
    train: &[Sample],
    val: &[Sample],
    cfg: &TrainConfig,
    init: Option<&HeadModel>,
) -> Result<(HeadModel, Vec<TrainLog>, usize)> {
    let wrap = |e: Error| Error::Stage { stage, source: alloc::boxed::Box::new(e) };
    let runs = train_head_restarts(train, val, cfg, init).map_err(wrap)?;
    let (best, model) = select_best_restart(&runs, val).map_err(wrap)?;
    let model = model.clone();
    let logs = runs
        .into_iter()
        .map(|(_, mut log)| {
            log.stage = stage.into();
            log
        })
        .collect();
    Ok((model, logs, best))
}

pub fn transfer_train_restarts(
    source_train: &[Sample],
    source_val: &[Sample],
    target_train: &[Sample],
    target_val: &[Sample],
    cfg_source: &TrainConfig,
    cfg_target: &TrainConfig,
) -> Result<TransferRuns> {
    let dim = source_train.first().map_or(0, |(x, _)| x.len());
    check_dims(&[source_val, target_train, target_val], dim)?;
    let (source_model, source_logs, source_best) = run_stage("source", source_train, source_val, cfg_source, None)?;
    let (model, target_logs, target_best) =
        run_stage("target", target_train, target_val, cfg_target, Some(&source_model))?;
    Ok(TransferRuns { model, source_logs, source_best, target_logs, target_best })
}
