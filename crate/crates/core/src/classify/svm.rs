//! One-vs-rest linear SVM.
//!
//! Each label gets a binary problem
//!
//! ```text
//! minimize  (1/n) * sum_i c_i * max(0, 1 - s_i * (w.x_i + b)) + (1/C) * R(w)
//! ```
//!
//! with `s_i = +1` for the target label and `-1` otherwise, `R(w) = |w|_1` or
//! `|w|^2 / 2`, and per-example weights `c_i` (all 1, or `n / (k * n_label)`
//! when balanced). The bias is not penalized.
//!
//! Under the default [`CScaling::Total`] the `1/C` above becomes `1/(n*C)`,
//! which makes the problem `R(w)/C + sum_i c_i * hinge_i` up to a constant
//! factor, the usual meaning of `C` for linear SVMs.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::Csr;
use super::{check_query, require_two_classes, validate_training, Classifier, Prediction};
use crate::error::ClassifyError;
use crate::features::FeatureVector;
use crate::TriageLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Penalty {
    #[default]
    L1,
    /// Half the squared Euclidean norm.
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loss {
    #[default]
    Hinge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassWeight {
    #[default]
    Uniform,
    Balanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimizer {
    /// Accelerated proximal gradient on a smoothed hinge, with the smoothing
    /// shrunk in stages. Returns the iterate with the lowest true objective.
    #[default]
    Accelerated,
    /// Mini-batch proximal subgradient steps over seeded shuffles.
    Subgradient,
}

/// How `C` relates to the penalty weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CScaling {
    /// Penalty weight `1/(n*C)`: `C` trades the penalty against the summed
    /// loss.
    #[default]
    Total,
    /// Penalty weight `1/C` against the averaged loss; duplicating every
    /// example leaves the solution unchanged.
    Average,
}

macro_rules! str_enum {
    ($t:ty { $($v:path => $s:literal),* $(,)? }) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($v => $s),* })
            }
        }
        impl FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s.to_ascii_lowercase().as_str() {
                    $($s => Ok($v),)*
                    _ => Err(format!("unknown {} {s:?}", stringify!($t).to_lowercase())),
                }
            }
        }
    };
}

str_enum!(Penalty { Penalty::L1 => "l1", Penalty::L2 => "l2" });
str_enum!(ClassWeight { ClassWeight::Uniform => "uniform", ClassWeight::Balanced => "balanced" });
str_enum!(CScaling { CScaling::Total => "total", CScaling::Average => "average" });
str_enum!(Optimizer { Optimizer::Accelerated => "accelerated", Optimizer::Subgradient => "subgradient" });

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    #[serde(rename = "C")]
    pub c: f64,
    pub c_scaling: CScaling,
    pub penalty: Penalty,
    pub loss: Loss,
    pub max_iterations: usize,
    pub seed: u64,
    pub class_weight: ClassWeight,
    pub optimizer: Optimizer,
    /// Stop a smoothing stage once the gradient-mapping norm falls below this.
    pub tolerance: f64,
    /// Initial step size of the subgradient optimizer.
    pub learning_rate: f64,
    /// Step size at batch `t` is `learning_rate / (1 + decay * t)`.
    pub decay: f64,
    pub batch_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            c: 1.0,
            c_scaling: CScaling::Total,
            penalty: Penalty::L1,
            loss: Loss::Hinge,
            max_iterations: 2000,
            seed: 0,
            class_weight: ClassWeight::Uniform,
            optimizer: Optimizer::Accelerated,
            tolerance: 1e-6,
            learning_rate: 0.1,
            decay: 0.01,
            batch_size: 32,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        let bad = |m: String| Err(ClassifyError::InvalidParameter(m));
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad(format!("C must be positive and finite, got {}", self.c));
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1".into());
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return bad(format!(
                "tolerance must be non-negative, got {}",
                self.tolerance
            ));
        }
        if self.optimizer == Optimizer::Subgradient {
            if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
                return bad(format!(
                    "learning_rate must be positive, got {}",
                    self.learning_rate
                ));
            }
            if self.decay.is_nan() || self.decay < 0.0 {
                return bad(format!("decay must be non-negative, got {}", self.decay));
            }
            if self.batch_size == 0 {
                return bad("batch_size must be at least 1".into());
            }
        }
        Ok(())
    }

    /// Penalty weight for a training set of `n` examples.
    pub fn lambda(&self, n: usize) -> f64 {
        match self.c_scaling {
            CScaling::Total => 1.0 / (self.c * n as f64),
            CScaling::Average => 1.0 / self.c,
        }
    }
}

/// Per-example loss weights for `ys` under `scheme`.
pub fn example_weights(ys: &[TriageLabel], scheme: ClassWeight) -> Vec<f64> {
    match scheme {
        ClassWeight::Uniform => vec![1.0; ys.len()],
        ClassWeight::Balanced => {
            let mut counts = [0usize; 4];
            for y in ys {
                counts[y.index()] += 1;
            }
            let k = counts.iter().filter(|&&c| c > 0).count() as f64;
            let n = ys.len() as f64;
            ys.iter()
                .map(|y| n / (k * counts[y.index()] as f64))
                .collect()
        }
    }
}

/// Stages of the smoothing parameter used by the accelerated optimizer.
const SMOOTHING: [f64; 6] = [1.0, 0.1, 1e-2, 1e-3, 1e-4, 1e-5];

/// Huber-smoothed hinge `h(z)` and its derivative.
fn smooth_hinge(z: f64, mu: f64) -> (f64, f64) {
    if z <= 0.0 {
        (0.0, 0.0)
    } else if z < mu {
        (z * z / (2.0 * mu), z / mu)
    } else {
        (z - mu / 2.0, 1.0)
    }
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// One binary hinge problem of the one-vs-rest decomposition.
#[derive(Debug, Clone)]
pub struct BinaryProblem<'a> {
    x: Cow<'a, Csr>,
    /// `+1` / `-1`.
    signs: Vec<f64>,
    /// `c_i / n`.
    coef: Vec<f64>,
    lambda: f64,
    penalty: Penalty,
}

impl<'a> BinaryProblem<'a> {
    /// `positive[i]` marks the target class; `weights` are the `c_i`;
    /// `lambda` is the penalty weight (see [`TrainConfig::lambda`]).
    pub fn new(
        xs: &[FeatureVector],
        positive: &[bool],
        weights: &[f64],
        lambda: f64,
        penalty: Penalty,
    ) -> Result<BinaryProblem<'static>, ClassifyError> {
        let dim = xs.first().ok_or(ClassifyError::Empty)?.dim();
        if positive.len() != xs.len() || weights.len() != xs.len() {
            return Err(ClassifyError::LengthMismatch {
                features: xs.len(),
                labels: positive.len().min(weights.len()),
            });
        }
        Ok(BinaryProblem::with_matrix(
            Cow::Owned(Csr::from_vectors(xs, dim)),
            positive,
            weights,
            lambda,
            penalty,
        ))
    }

    fn with_matrix(
        x: Cow<'a, Csr>,
        positive: &[bool],
        weights: &[f64],
        lambda: f64,
        penalty: Penalty,
    ) -> Self {
        let n = x.rows() as f64;
        BinaryProblem {
            signs: positive
                .iter()
                .map(|&p| if p { 1.0 } else { -1.0 })
                .collect(),
            coef: weights.iter().map(|c| c / n).collect(),
            x,
            lambda,
            penalty,
        }
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    fn margins(&self, w: &[f64], b: f64, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.x.dot_row(i, w) + b;
        }
    }

    fn penalty_value(&self, w: &[f64]) -> f64 {
        match self.penalty {
            Penalty::L1 => self.lambda * w.iter().map(|v| v.abs()).sum::<f64>(),
            Penalty::L2 => 0.5 * self.lambda * w.iter().map(|v| v * v).sum::<f64>(),
        }
    }

    fn hinge_from_margins(&self, margins: &[f64]) -> f64 {
        margins
            .iter()
            .zip(&self.signs)
            .zip(&self.coef)
            .map(|((m, s), a)| a * (1.0 - s * m).max(0.0))
            .sum()
    }

    /// Objective value at `(w, b)`.
    pub fn objective(&self, w: &[f64], b: f64) -> f64 {
        let mut m = vec![0.0; self.x.rows()];
        self.margins(w, b, &mut m);
        self.hinge_from_margins(&m) + self.penalty_value(w)
    }

    /// A subgradient at `(w, b)`: the gradient wherever the objective is
    /// differentiable.
    pub fn subgradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let mut gw = vec![0.0; self.dim()];
        let mut gb = 0.0;
        for i in 0..self.x.rows() {
            let s = self.signs[i];
            if 1.0 - s * (self.x.dot_row(i, w) + b) > 0.0 {
                let g = -self.coef[i] * s;
                self.x.axpy_row(i, g, &mut gw);
                gb += g;
            }
        }
        for (g, v) in gw.iter_mut().zip(w) {
            *g += match self.penalty {
                Penalty::L1 => {
                    self.lambda
                        * if *v > 0.0 {
                            1.0
                        } else if *v < 0.0 {
                            -1.0
                        } else {
                            0.0
                        }
                }
                Penalty::L2 => self.lambda * v,
            };
        }
        (gw, gb)
    }

    /// Minimize the objective; returns `(w, b)`.
    pub fn solve(&self, cfg: &TrainConfig) -> (Vec<f64>, f64) {
        match cfg.optimizer {
            Optimizer::Accelerated => self.solve_accelerated(cfg),
            Optimizer::Subgradient => self.solve_subgradient(cfg),
        }
    }

    /// Largest eigenvalue of `sum_i a_i [x_i, 1][x_i, 1]^T`, by power
    /// iteration.
    fn curvature(&self) -> f64 {
        let d = self.dim();
        let mut v = vec![1.0 / ((d + 1) as f64).sqrt(); d + 1];
        let mut est = 0.0;
        let mut av = vec![0.0; d + 1];
        for _ in 0..50 {
            av.iter_mut().for_each(|x| *x = 0.0);
            for i in 0..self.x.rows() {
                let p = self.x.dot_row(i, &v[..d]) + v[d];
                let a = self.coef[i] * p;
                self.x.axpy_row(i, a, &mut av[..d]);
                av[d] += a;
            }
            let norm = av.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            let converged = (norm - est).abs() <= 1e-6 * norm;
            est = norm;
            for (x, y) in v.iter_mut().zip(&av) {
                *x = y / norm;
            }
            if converged {
                break;
            }
        }
        est
    }

    fn prox(&self, v: f64, step: f64) -> f64 {
        match self.penalty {
            Penalty::L1 => soft_threshold(v, self.lambda * step),
            Penalty::L2 => v / (1.0 + self.lambda * step),
        }
    }

    #[allow(clippy::needless_range_loop)]
    fn solve_accelerated(&self, cfg: &TrainConfig) -> (Vec<f64>, f64) {
        let n = self.x.rows();
        let d = self.dim();
        let curvature = self.curvature().max(1e-12) * 1.05;

        let mut w = vec![0.0; d];
        let mut b = 0.0;
        let mut mw = vec![0.0; n];
        let mut best = (
            self.hinge_from_margins(&mw) + self.penalty_value(&w),
            w.clone(),
            b,
        );

        let mut w_prev = w.clone();
        let mut b_prev;
        let mut mw_prev = mw.clone();
        let mut y = vec![0.0; d];
        let mut my = vec![0.0; n];
        let mut grad = vec![0.0; d];
        let mut w_new = vec![0.0; d];
        let mut m_new = vec![0.0; n];

        let mut remaining = cfg.max_iterations;
        for (stage, &mu) in SMOOTHING.iter().enumerate() {
            let budget = remaining.div_ceil(SMOOTHING.len() - stage);
            let mut lip = curvature / mu;
            let mut t: f64 = 1.0;
            w_prev.copy_from_slice(&w);
            b_prev = b;
            mw_prev.copy_from_slice(&mw);
            let mut used = 0;
            while used < budget {
                used += 1;
                let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
                let beta = (t - 1.0) / t_next;
                for j in 0..d {
                    y[j] = w[j] + beta * (w[j] - w_prev[j]);
                }
                let yb = b + beta * (b - b_prev);
                for i in 0..n {
                    my[i] = mw[i] + beta * (mw[i] - mw_prev[i]);
                }

                grad.iter_mut().for_each(|g| *g = 0.0);
                let mut grad_b = 0.0;
                let mut f_y = 0.0;
                for i in 0..n {
                    let (h, dh) = smooth_hinge(1.0 - self.signs[i] * my[i], mu);
                    f_y += self.coef[i] * h;
                    if dh != 0.0 {
                        let g = -self.coef[i] * self.signs[i] * dh;
                        self.x.axpy_row(i, g, &mut grad);
                        grad_b += g;
                    }
                }

                lip *= 0.9;
                let (b_new, step_sq) = loop {
                    let step = 1.0 / lip;
                    for j in 0..d {
                        w_new[j] = self.prox(y[j] - step * grad[j], step);
                    }
                    let b_new = yb - step * grad_b;
                    self.margins(&w_new, b_new, &mut m_new);
                    let f_new: f64 = (0..n)
                        .map(|i| self.coef[i] * smooth_hinge(1.0 - self.signs[i] * m_new[i], mu).0)
                        .sum();
                    let mut lin = (b_new - yb) * grad_b;
                    let mut sq = (b_new - yb) * (b_new - yb);
                    for j in 0..d {
                        let diff = w_new[j] - y[j];
                        lin += diff * grad[j];
                        sq += diff * diff;
                    }
                    // A zero step means y is already a fixed point.
                    if sq == 0.0 || f_new <= f_y + lin + 0.5 * lip * sq + 1e-12 * f_y.abs() {
                        break (b_new, sq);
                    }
                    lip *= 2.0;
                };

                let objective = self.hinge_from_margins(&m_new) + self.penalty_value(&w_new);
                if objective < best.0 {
                    best = (objective, w_new.clone(), b_new);
                }

                // Restart momentum when it points uphill.
                let mut uphill = (yb - b_new) * (b_new - b);
                for j in 0..d {
                    uphill += (y[j] - w_new[j]) * (w_new[j] - w[j]);
                }
                std::mem::swap(&mut w_prev, &mut w);
                std::mem::swap(&mut w, &mut w_new);
                std::mem::swap(&mut mw_prev, &mut mw);
                std::mem::swap(&mut mw, &mut m_new);
                b_prev = b;
                b = b_new;
                if uphill > 0.0 {
                    t = 1.0;
                    w_prev.copy_from_slice(&w);
                    b_prev = b;
                    mw_prev.copy_from_slice(&mw);
                } else {
                    t = t_next;
                }

                if lip * step_sq.sqrt() <= cfg.tolerance {
                    break;
                }
            }
            remaining -= used;
            if remaining == 0 {
                break;
            }
        }
        (best.1, best.2)
    }

    fn solve_subgradient(&self, cfg: &TrainConfig) -> (Vec<f64>, f64) {
        let n = self.x.rows();
        let d = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut order: Vec<usize> = (0..n).collect();
        let mut w = vec![0.0; d];
        let mut b = 0.0;
        let mut best = (self.objective(&w, b), w.clone(), b);
        let mut grad = vec![0.0; d];
        let mut step_count = 0usize;
        for _ in 0..cfg.max_iterations {
            order.shuffle(&mut rng);
            for batch in order.chunks(cfg.batch_size) {
                let eta = cfg.learning_rate / (1.0 + cfg.decay * step_count as f64);
                step_count += 1;
                grad.iter_mut().for_each(|g| *g = 0.0);
                let mut grad_b = 0.0;
                // Batch estimate of the averaged loss: coef_i * n / |batch|.
                let scale = n as f64 / batch.len() as f64;
                for &i in batch {
                    let s = self.signs[i];
                    if 1.0 - s * (self.x.dot_row(i, &w) + b) > 0.0 {
                        let g = -self.coef[i] * s * scale;
                        self.x.axpy_row(i, g, &mut grad);
                        grad_b += g;
                    }
                }
                for j in 0..d {
                    w[j] = self.prox(w[j] - eta * grad[j], eta);
                }
                b -= eta * grad_b;
            }
            let objective = self.objective(&w, b);
            if objective < best.0 {
                best = (objective, w.clone(), b);
            }
        }
        (best.1, best.2)
    }
}

/// Fitted one-vs-rest linear SVM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvmModel {
    /// Label of each weight row; always [`TriageLabel::ALL`].
    pub labels: Vec<TriageLabel>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub fingerprint: String,
    pub config: TrainConfig,
}

impl LinearSvmModel {
    pub fn dim(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    /// Raw margins, without fingerprint or dimension checks.
    pub fn scores(&self, x: &FeatureVector) -> [f64; 4] {
        let mut scores = [0.0; 4];
        for ((label, w), b) in self.labels.iter().zip(&self.weights).zip(&self.biases) {
            scores[label.index()] = x.dot(w) + b;
        }
        scores
    }

    /// Objective of one label's binary problem on `(xs, ys)` under this
    /// model's config.
    pub fn objective(
        &self,
        label: TriageLabel,
        xs: &[FeatureVector],
        ys: &[TriageLabel],
    ) -> Result<f64, ClassifyError> {
        let row = self
            .labels
            .iter()
            .position(|&l| l == label)
            .expect("every label has a row");
        let positive: Vec<bool> = ys.iter().map(|&y| y == label).collect();
        let weights = example_weights(ys, self.config.class_weight);
        let lambda = self.config.lambda(xs.len());
        let problem = BinaryProblem::new(xs, &positive, &weights, lambda, self.config.penalty)?;
        Ok(problem.objective(&self.weights[row], self.biases[row]))
    }
}

impl Classifier for LinearSvmModel {
    fn predict(&self, x: &FeatureVector) -> Result<Prediction, ClassifyError> {
        check_query(x, self.dim(), &self.fingerprint)?;
        Ok(Prediction::from_scores(self.scores(x)))
    }
}

/// Train one binary SVM per label.
pub fn train_svm(
    xs: &[FeatureVector],
    ys: &[TriageLabel],
    cfg: &TrainConfig,
) -> Result<LinearSvmModel, ClassifyError> {
    cfg.validate()?;
    let dim = validate_training(xs, ys)?;
    require_two_classes(ys)?;
    let matrix = Csr::from_vectors(xs, dim);
    let weights = example_weights(ys, cfg.class_weight);
    let mut model = LinearSvmModel {
        labels: TriageLabel::ALL.to_vec(),
        weights: Vec::with_capacity(4),
        biases: Vec::with_capacity(4),
        fingerprint: xs[0].fingerprint.to_string(),
        config: cfg.clone(),
    };
    for label in TriageLabel::ALL {
        let positive: Vec<bool> = ys.iter().map(|&y| y == label).collect();
        let problem = BinaryProblem::with_matrix(
            Cow::Borrowed(&matrix),
            &positive,
            &weights,
            cfg.lambda(xs.len()),
            cfg.penalty,
        );
        let (w, b) = problem.solve(cfg);
        model.weights.push(w);
        model.biases.push(b);
    }
    Ok(model)
}
