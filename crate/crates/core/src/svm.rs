//! Binary soft-margin SVM trained with Platt's sequential minimal
//! optimization, and C-grid tuning on validation F1.
//!
//! The decision function is `f(x) = sum_i coef_i * K(sv_i, x) + bias` with
//! `coef_i = alpha_i * y_i`, `y_i` in {-1, +1}. A score above zero is HIGH;
//! zero and below is LOW.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Severity;
use crate::error::{Error, Result};
use crate::eval::ConfusionCounts;
use crate::features::SparseVector;

/// Default regularization grid searched by [`tune_c`].
pub const DEFAULT_C_GRID: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

/// Kernels above this many training points are evaluated on demand instead of
/// being cached as a dense Gram matrix.
const DENSE_GRAM_LIMIT: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    /// `1 / (n_features * variance of all feature values)`.
    Scale,
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Linear,
    Rbf(Gamma),
}

impl Default for KernelSpec {
    fn default() -> KernelSpec {
        KernelSpec::Rbf(Gamma::Scale)
    }
}

impl KernelSpec {
    /// Fixes `gamma` against the training data.
    pub fn resolve(self, xs: &[SparseVector]) -> Result<Kernel> {
        match self {
            KernelSpec::Linear => Ok(Kernel::Linear),
            KernelSpec::Rbf(Gamma::Value(g)) if g > 0.0 && g.is_finite() => Ok(Kernel::Rbf { gamma: g }),
            KernelSpec::Rbf(Gamma::Value(_)) => Err(Error::InvalidConfig("RBF gamma must be positive")),
            KernelSpec::Rbf(Gamma::Scale) => Ok(Kernel::Rbf {
                gamma: scale_gamma(xs),
            }),
        }
    }
}

/// `1 / (V * Var(X))` over every entry of the n x V design matrix, zeros
/// included; 1.0 when the variance is zero.
pub fn scale_gamma(xs: &[SparseVector]) -> f64 {
    let dim = xs.first().map_or(0, SparseVector::dim);
    let cells = (xs.len() * dim) as f64;
    if cells == 0.0 {
        return 1.0;
    }
    let (sum, sum_sq) = xs
        .iter()
        .flat_map(|x| x.iter())
        .fold((0.0, 0.0), |(s, q), (_, v)| (s + v, q + v * v));
    let mean = sum / cells;
    let var = sum_sq / cells - mean * mean;
    if var > 0.0 {
        1.0 / (dim as f64 * var)
    } else {
        1.0
    }
}

/// A kernel with every parameter fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn eval(&self, a: &SparseVector, b: &SparseVector) -> f64 {
        match *self {
            Kernel::Linear => a.dot(b),
            Kernel::Rbf { gamma } => {
                let d = (a.norm_sq() + b.norm_sq() - 2.0 * a.dot(b)).max(0.0);
                libm::exp(-gamma * d)
            }
        }
    }

    fn eval_with_norms(&self, a: &SparseVector, na: f64, b: &SparseVector, nb: f64) -> f64 {
        match *self {
            Kernel::Linear => a.dot(b),
            Kernel::Rbf { gamma } => libm::exp(-gamma * (na + nb - 2.0 * a.dot(b)).max(0.0)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmConfig {
    pub c: f64,
    pub kernel: KernelSpec,
    pub tol: f64,
    /// Cap on outer SMO loop iterations (full sweeps or non-bound sweeps).
    pub max_passes: usize,
    pub seed: u64,
    /// Optional `(low, high)` multipliers on C per class.
    pub class_weights: Option<(f64, f64)>,
}

impl Default for SvmConfig {
    fn default() -> SvmConfig {
        SvmConfig {
            c: 1.0,
            kernel: KernelSpec::default(),
            tol: 1e-3,
            max_passes: 100_000,
            seed: 0,
            class_weights: None,
        }
    }
}

impl SvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidConfig("C must be positive"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig("tol must be positive"));
        }
        if let Some((lo, hi)) = self.class_weights {
            if !(lo > 0.0 && hi > 0.0 && lo.is_finite() && hi.is_finite()) {
                return Err(Error::InvalidConfig("class weights must be positive"));
            }
        }
        Ok(())
    }

    fn bound(&self, label: Severity) -> f64 {
        match (self.class_weights, label) {
            (None, _) => self.c,
            (Some((lo, _)), Severity::Low) => self.c * lo,
            (Some((_, hi)), Severity::High) => self.c * hi,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub kernel: Kernel,
    pub c: f64,
    pub dim: usize,
    pub support_vectors: Vec<SparseVector>,
    /// `alpha_i * y_i` for each support vector.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
}

impl SvmModel {
    pub fn decision_score(&self, x: &SparseVector) -> Result<f64> {
        decision_score(self, x)
    }

    pub fn predict(&self, x: &SparseVector) -> Result<Severity> {
        Ok(classify(self.decision_score(x)?))
    }
}

/// Score above zero is HIGH; ties break LOW.
pub fn classify(score: f64) -> Severity {
    if score > 0.0 {
        Severity::High
    } else {
        Severity::Low
    }
}

pub fn decision_score(model: &SvmModel, x: &SparseVector) -> Result<f64> {
    if x.dim() != model.dim {
        return Err(Error::DimensionMismatch {
            expected: model.dim,
            found: x.dim(),
        });
    }
    let xn = x.norm_sq();
    let sum: f64 = model
        .support_vectors
        .iter()
        .zip(&model.dual_coefs)
        .map(|(sv, coef)| coef * model.kernel.eval_with_norms(sv, sv.norm_sq(), x, xn))
        .sum();
    Ok(sum + model.bias)
}

/// Everything the solver produced, including the full multiplier vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmTraining {
    pub model: SvmModel,
    /// One multiplier per training point, in input order.
    pub alpha: Vec<f64>,
    /// Per-point upper bound (C times any class multiplier).
    pub bounds: Vec<f64>,
    pub passes: usize,
}

pub fn train_svm(train: &[(SparseVector, Severity)], config: &SvmConfig) -> Result<SvmModel> {
    train_svm_detailed(train, config).map(|t| t.model)
}

enum Gram {
    Dense { n: usize, k: Vec<f64> },
    OnDemand { norms: Vec<f64> },
}

struct Problem<'a> {
    xs: Vec<&'a SparseVector>,
    y: Vec<f64>,
    bounds: Vec<f64>,
    kernel: Kernel,
    gram: Gram,
}

impl Problem<'_> {
    fn k(&self, i: usize, j: usize) -> f64 {
        match &self.gram {
            Gram::Dense { n, k } => k[i * n + j],
            Gram::OnDemand { norms } => self.kernel.eval_with_norms(self.xs[i], norms[i], self.xs[j], norms[j]),
        }
    }
}

struct Smo<'a> {
    p: Problem<'a>,
    alpha: Vec<f64>,
    bias: f64,
    /// `f(x_i) - y_i` for every point, updated incrementally.
    err: Vec<f64>,
    tol: f64,
    rng: ChaCha8Rng,
}

const ALPHA_EPS: f64 = 1e-12;

impl Smo<'_> {
    /// Resets `b` from the current multipliers: the mean of the free-point
    /// values if any exist, otherwise the midpoint of the interval allowed
    /// by the bound points.
    fn refine_bias(&mut self) {
        let (mut lower, mut upper) = (f64::NEG_INFINITY, f64::INFINITY);
        let (mut free_sum, mut n_free) = (0.0, 0usize);
        for i in 0..self.alpha.len() {
            let y = self.p.y[i];
            // bias-free decision value is g = err + y - b, and the target b is y - g
            let b_i = self.bias - self.err[i];
            if self.non_bound(i) {
                free_sum += b_i;
                n_free += 1;
            } else if (self.alpha[i] <= 0.0) == (y > 0.0) {
                lower = lower.max(b_i);
            } else {
                upper = upper.min(b_i);
            }
        }
        let new_bias = if n_free > 0 {
            free_sum / n_free as f64
        } else if lower.is_finite() && upper.is_finite() {
            0.5 * (lower + upper)
        } else if lower.is_finite() {
            lower
        } else if upper.is_finite() {
            upper
        } else {
            self.bias
        };
        let db = new_bias - self.bias;
        for e in &mut self.err {
            *e += db;
        }
        self.bias = new_bias;
    }

    fn non_bound(&self, i: usize) -> bool {
        self.alpha[i] > 0.0 && self.alpha[i] < self.p.bounds[i]
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (a1_old, a2_old) = (self.alpha[i1], self.alpha[i2]);
        let (y1, y2) = (self.p.y[i1], self.p.y[i2]);
        let (c1, c2) = (self.p.bounds[i1], self.p.bounds[i2]);
        let (e1, e2) = (self.err[i1], self.err[i2]);
        let s = y1 * y2;
        let (lo, hi) = if s < 0.0 {
            ((a2_old - a1_old).max(0.0), c2.min(c1 + a2_old - a1_old))
        } else {
            ((a2_old + a1_old - c1).max(0.0), c2.min(a2_old + a1_old))
        };
        if hi - lo <= 0.0 {
            return false;
        }
        let k11 = self.p.k(i1, i1);
        let k12 = self.p.k(i1, i2);
        let k22 = self.p.k(i2, i2);
        let eta = k11 + k22 - 2.0 * k12;
        let mut a2 = if eta > 0.0 {
            (a2_old + y2 * (e1 - e2) / eta).clamp(lo, hi)
        } else {
            // objective along the constraint line is linear; pick the better end
            let f1 = y1 * (e1 - self.bias) - a1_old * k11 - s * a2_old * k12;
            let f2 = y2 * (e2 - self.bias) - s * a1_old * k12 - a2_old * k22;
            let end = |a2: f64| {
                let a1 = a1_old + s * (a2_old - a2);
                a1 * f1 + a2 * f2 + 0.5 * a1 * a1 * k11 + 0.5 * a2 * a2 * k22 + s * a1 * a2 * k12
            };
            let (lobj, hobj) = (end(lo), end(hi));
            if lobj < hobj - ALPHA_EPS {
                lo
            } else if lobj > hobj + ALPHA_EPS {
                hi
            } else {
                a2_old
            }
        };
        // snap to the box edges so bound membership is exact
        if a2 < 1e-12 * c2 {
            a2 = 0.0;
        } else if a2 > c2 * (1.0 - 1e-12) {
            a2 = c2;
        }
        if (a2 - a2_old).abs() < ALPHA_EPS * (a2 + a2_old + ALPHA_EPS) {
            return false;
        }
        let mut a1 = a1_old + s * (a2_old - a2);
        if a1 < 1e-12 * c1 {
            a1 = 0.0;
        } else if a1 > c1 * (1.0 - 1e-12) {
            a1 = c1;
        }

        let d1 = y1 * (a1 - a1_old);
        let d2 = y2 * (a2 - a2_old);
        let b1 = self.bias - e1 - d1 * k11 - d2 * k12;
        let b2 = self.bias - e2 - d1 * k12 - d2 * k22;
        let new_bias = if a1 > 0.0 && a1 < c1 {
            b1
        } else if a2 > 0.0 && a2 < c2 {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        let db = new_bias - self.bias;
        for k in 0..self.err.len() {
            self.err[k] += d1 * self.p.k(i1, k) + d2 * self.p.k(i2, k) + db;
        }
        self.alpha[i1] = a1;
        self.alpha[i2] = a2;
        self.bias = new_bias;
        true
    }

    fn examine(&mut self, i2: usize) -> bool {
        let y2 = self.p.y[i2];
        let a2 = self.alpha[i2];
        let e2 = self.err[i2];
        let r2 = e2 * y2;
        let violates = (r2 < -self.tol && a2 < self.p.bounds[i2]) || (r2 > self.tol && a2 > 0.0);
        if !violates {
            return false;
        }
        let n = self.alpha.len();
        let non_bound: Vec<usize> = (0..n).filter(|&i| self.non_bound(i)).collect();
        if non_bound.len() > 1 {
            let best = non_bound
                .iter()
                .copied()
                .max_by(|&a, &b| (self.err[a] - e2).abs().total_cmp(&(self.err[b] - e2).abs()));
            if let Some(i1) = best {
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        if !non_bound.is_empty() {
            let start = self.rng.random_range(0..non_bound.len());
            for k in 0..non_bound.len() {
                let i1 = non_bound[(start + k) % non_bound.len()];
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        let start = self.rng.random_range(0..n);
        for k in 0..n {
            if self.take_step((start + k) % n, i2) {
                return true;
            }
        }
        false
    }
}

/// Trains with Platt's SMO. On return every training point satisfies the
/// KKT conditions within `config.tol`.
pub fn train_svm_detailed(train: &[(SparseVector, Severity)], config: &SvmConfig) -> Result<SvmTraining> {
    config.validate()?;
    if train.is_empty() || train.iter().all(|(_, l)| *l == train[0].1) {
        return Err(Error::SingleClass);
    }
    let dim = train[0].0.dim();
    for (i, (x, _)) in train.iter().enumerate() {
        if x.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: x.dim() });
        }
        if !x.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
    }
    let owned: Vec<SparseVector> = train.iter().map(|(x, _)| x.clone()).collect();
    let kernel = config.kernel.resolve(&owned)?;
    let n = train.len();
    let xs: Vec<&SparseVector> = train.iter().map(|(x, _)| x).collect();
    let norms: Vec<f64> = xs.iter().map(|x| x.norm_sq()).collect();
    let gram = if n <= DENSE_GRAM_LIMIT {
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = kernel.eval_with_norms(xs[i], norms[i], xs[j], norms[j]);
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        Gram::Dense { n, k }
    } else {
        Gram::OnDemand { norms }
    };
    let y: Vec<f64> = train.iter().map(|(_, l)| if l.is_high() { 1.0 } else { -1.0 }).collect();
    let bounds: Vec<f64> = train.iter().map(|(_, l)| config.bound(*l)).collect();
    let err: Vec<f64> = y.iter().map(|yi| -yi).collect();

    let mut smo = Smo {
        p: Problem { xs, y, bounds, kernel, gram },
        alpha: vec![0.0; n],
        bias: 0.0,
        err,
        tol: config.tol,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
    };

    let mut examine_all = true;
    let mut refined = false;
    let mut passes = 0;
    loop {
        let mut changed = 0usize;
        if examine_all {
            for i in 0..n {
                changed += usize::from(smo.examine(i));
            }
        } else {
            for i in 0..n {
                if smo.non_bound(i) {
                    changed += usize::from(smo.examine(i));
                }
            }
        }
        passes += 1;
        if examine_all {
            if changed == 0 {
                // a clean pass may still leave violators that no pair step
                // can fix; settle b and sweep once more
                if refined {
                    break;
                }
                smo.refine_bias();
                refined = true;
            } else {
                refined = false;
                examine_all = false;
            }
        } else if changed == 0 {
            examine_all = true;
        }
        if passes >= config.max_passes {
            return Err(Error::NotConverged { passes });
        }
    }

    let mut support_vectors = Vec::new();
    let mut dual_coefs = Vec::new();
    for ((x, _), (&alpha, &y)) in train.iter().zip(smo.alpha.iter().zip(&smo.p.y)) {
        if alpha > 0.0 {
            support_vectors.push(x.clone());
            dual_coefs.push(alpha * y);
        }
    }
    Ok(SvmTraining {
        model: SvmModel {
            kernel,
            c: config.c,
            dim,
            support_vectors,
            dual_coefs,
            bias: smo.bias,
        },
        alpha: smo.alpha,
        bounds: smo.p.bounds,
        passes,
    })
}

/// Largest KKT violation over the training set, measured on `y_i f(x_i)`
/// with the margin target 1: points at zero need `yf >= 1`, points at the
/// bound need `yf <= 1`, free points need `yf = 1`.
pub fn max_kkt_violation(training: &SvmTraining, train: &[(SparseVector, Severity)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, (x, label)) in train.iter().enumerate() {
        let y = if label.is_high() { 1.0 } else { -1.0 };
        let margin = y * decision_score(&training.model, x)?;
        let a = training.alpha[i];
        let v = if a <= 0.0 {
            (1.0 - margin).max(0.0)
        } else if a >= training.bounds[i] {
            (margin - 1.0).max(0.0)
        } else {
            (margin - 1.0).abs()
        };
        worst = worst.max(v);
    }
    Ok(worst)
}

/// Outcome of training one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub c: f64,
    /// Positive-class F1 on validation; `None` if training failed.
    pub f1: Option<f64>,
    pub error: Option<Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tuning {
    pub best_c: f64,
    pub best_model: SvmModel,
    pub table: Vec<GridPoint>,
}

/// Positive-class F1 at the zero threshold; 0 when undefined.
fn validation_f1(model: &SvmModel, val: &[(SparseVector, Severity)]) -> Result<f64> {
    let mut counts = ConfusionCounts::default();
    for (x, label) in val {
        counts.record(classify(decision_score(model, x)?).is_high(), label.is_high());
    }
    Ok(counts.f1_binary().unwrap_or(0.0))
}

/// Trains one model per C and keeps the one with the best validation F1,
/// breaking ties toward the smaller C. Failed grid points are recorded and
/// skipped; the call fails only if every point fails.
pub fn tune_c(
    train: &[(SparseVector, Severity)],
    val: &[(SparseVector, Severity)],
    grid: &[f64],
    base: &SvmConfig,
) -> Result<Tuning> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("C grid is empty"));
    }
    let mut table = Vec::with_capacity(grid.len());
    let mut best: Option<(f64, f64, SvmModel)> = None;
    let mut last_err = None;
    for &c in grid {
        let config = SvmConfig { c, ..base.clone() };
        let outcome = train_svm(train, &config).and_then(|m| validation_f1(&m, val).map(|f1| (m, f1)));
        match outcome {
            Ok((model, f1)) => {
                table.push(GridPoint { c, f1: Some(f1), error: None });
                let better = match &best {
                    None => true,
                    Some((best_c, best_f1, _)) => f1 > *best_f1 || (f1 == *best_f1 && c < *best_c),
                };
                if better {
                    best = Some((c, f1, model));
                }
            }
            Err(e) => {
                table.push(GridPoint { c, f1: None, error: Some(e.clone()) });
                last_err = Some(e);
            }
        }
    }
    match best {
        Some((best_c, _, best_model)) => Ok(Tuning { best_c, best_model, table }),
        None => Err(Error::AllGridPointsFailed {
            last: Box::new(last_err.unwrap_or(Error::NoResults)),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(coords: &[f64], high: bool) -> (SparseVector, Severity) {
        (
            SparseVector::from_dense(coords),
            if high { Severity::High } else { Severity::Low },
        )
    }

    fn linear(c: f64) -> SvmConfig {
        SvmConfig { c, kernel: KernelSpec::Linear, ..SvmConfig::default() }
    }

    #[test]
    fn symmetric_pair_has_unit_slope() {
        let data = [pt(&[-1.0], false), pt(&[1.0], true)];
        let m = train_svm(&data, &linear(100.0)).unwrap();
        let score = |v: f64| m.decision_score(&SparseVector::from_dense(&[v])).unwrap();
        assert!((score(2.0) - 2.0).abs() < 1e-9);
        assert!(score(0.0).abs() < 1e-12);
        assert_eq!(m.bias, 0.0);
        assert_eq!(m.predict(&SparseVector::from_dense(&[2.0])).unwrap(), Severity::High);
        assert_eq!(classify(0.0), Severity::Low);
    }

    #[test]
    fn xor_with_rbf_fits_training_set() {
        let data = [
            pt(&[0.0, 0.0], false),
            pt(&[1.0, 1.0], false),
            pt(&[0.0, 1.0], true),
            pt(&[1.0, 0.0], true),
        ];
        let config = SvmConfig { c: 100.0, kernel: KernelSpec::Rbf(Gamma::Value(1.0)), ..SvmConfig::default() };
        let m = train_svm(&data, &config).unwrap();
        for (x, label) in &data {
            assert_eq!(m.predict(x).unwrap(), *label);
        }
    }

    #[test]
    fn high_support_vector_scores_at_least_one() {
        let data = [pt(&[-2.0, 0.0], false), pt(&[-1.0, 1.0], false), pt(&[1.0, 0.5], true), pt(&[3.0, 0.0], true)];
        let training = train_svm_detailed(&data, &linear(1000.0)).unwrap();
        let m = &training.model;
        for (i, (x, label)) in data.iter().enumerate() {
            if label.is_high() && training.alpha[i] > 0.0 {
                assert!(m.decision_score(x).unwrap() >= 1.0 - 1e-3);
            }
        }
        assert_eq!(m.decision_score(&SparseVector::zeros(2)).unwrap(), m.bias);
    }

    #[test]
    fn errors() {
        let one_class = [pt(&[1.0], true), pt(&[2.0], true)];
        assert_eq!(train_svm(&one_class, &linear(1.0)), Err(Error::SingleClass));
        let bad = [pt(&[1.0], true), (SparseVector::from_pairs(1, alloc::vec![(0, 1.0)]).unwrap().scaled(f64::INFINITY), Severity::Low)];
        assert_eq!(train_svm(&bad, &linear(1.0)), Err(Error::NonFinite { index: 1 }));
        assert!(train_svm(&[pt(&[1.0], true), pt(&[0.0], false)], &linear(0.0)).is_err());
        let m = train_svm(&[pt(&[1.0], true), pt(&[-1.0], false)], &linear(1.0)).unwrap();
        assert_eq!(
            m.decision_score(&SparseVector::zeros(3)),
            Err(Error::DimensionMismatch { expected: 1, found: 3 })
        );
    }

    #[test]
    fn identical_input_gives_identical_model() {
        let data: Vec<_> = (0..30)
            .map(|i| {
                let x = (i as f64 * 0.37).sin();
                let y = (i as f64 * 1.3).cos();
                pt(&[x, y], x + 0.3 * y > 0.1)
            })
            .collect();
        let config = SvmConfig { c: 10.0, seed: 5, ..SvmConfig::default() };
        assert_eq!(train_svm(&data, &config).unwrap(), train_svm(&data, &config).unwrap());
    }

    #[test]
    fn scale_gamma_matches_definition() {
        let xs = [SparseVector::from_dense(&[1.0, 0.0]), SparseVector::from_dense(&[0.0, 3.0])];
        // entries 1, 0, 0, 3: mean 1, var (0 + 1 + 1 + 4) / 4 = 1.5
        assert!((scale_gamma(&xs) - 1.0 / (2.0 * 1.5)).abs() < 1e-15);
        assert_eq!(scale_gamma(&[SparseVector::zeros(3)]), 1.0);
    }

    #[test]
    fn tune_c_single_value_and_ties() {
        let data = [pt(&[-1.0], false), pt(&[1.0], true), pt(&[-2.0], false), pt(&[2.0], true)];
        let t = tune_c(&data, &data, &[3.0], &linear(1.0)).unwrap();
        assert_eq!(t.best_c, 3.0);
        // both values separate perfectly: F1 ties, smaller C wins even when listed second
        let t = tune_c(&data, &data, &[10.0, 1.0], &linear(1.0)).unwrap();
        assert_eq!(t.table.len(), 2);
        assert_eq!(t.best_c, 1.0);
        assert!(tune_c(&data, &data, &[], &linear(1.0)).is_err());
    }

    #[test]
    fn tune_c_skips_failed_points() {
        let data = [pt(&[-1.0], false), pt(&[1.0], true)];
        let t = tune_c(&data, &data, &[-1.0, 1.0], &linear(1.0)).unwrap();
        assert!(t.table[0].error.is_some());
        assert_eq!(t.best_c, 1.0);
        assert!(matches!(
            tune_c(&data, &data, &[-1.0], &linear(1.0)),
            Err(Error::AllGridPointsFailed { .. })
        ));
    }

    #[test]
    fn class_weights_scale_bounds() {
        let data = [pt(&[-1.0], false), pt(&[0.2], false), pt(&[-0.1], true), pt(&[1.0], true)];
        let config = SvmConfig { c: 0.5, class_weights: Some((1.0, 4.0)), ..linear(0.5) };
        let t = train_svm_detailed(&data, &config).unwrap();
        assert_eq!(t.bounds, [0.5, 0.5, 2.0, 2.0]);
        assert!(t.alpha.iter().zip(&t.bounds).all(|(a, c)| *a <= *c));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn kkt_and_feasibility_hold(
            points in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0, any::<bool>()), 4..25),
            c in prop_oneof![Just(0.1), Just(1.0), Just(10.0)],
            rbf in any::<bool>(),
        ) {
            let mut data: Vec<_> = points.iter().map(|&(a, b, h)| pt(&[a, b], h)).collect();
            data[0].1 = Severity::High;
            data[1].1 = Severity::Low;
            let kernel = if rbf { KernelSpec::Rbf(Gamma::Value(0.5)) } else { KernelSpec::Linear };
            let config = SvmConfig { c, kernel, ..SvmConfig::default() };
            let t = train_svm_detailed(&data, &config).unwrap();
            let signed: f64 = t.alpha.iter().zip(&data).map(|(a, (_, l))| if l.is_high() { *a } else { -*a }).sum();
            prop_assert!(signed.abs() < 1e-9);
            prop_assert!(t.alpha.iter().all(|&a| (0.0..=c).contains(&a)));
            prop_assert!(max_kkt_violation(&t, &data).unwrap() <= config.tol + 1e-9);

            // reordering support vectors leaves scores unchanged
            let mut rev = t.model.clone();
            rev.support_vectors.reverse();
            rev.dual_coefs.reverse();
            for (x, _) in &data {
                prop_assert!((rev.decision_score(x).unwrap() - t.model.decision_score(x).unwrap()).abs() < 1e-9);
            }
        }
    }
}
