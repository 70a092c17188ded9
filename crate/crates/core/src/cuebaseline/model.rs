use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textlex::FeatureVector;

pub const DIM: usize = FeatureVector::DIM;

/// One context sentence with its supporting-fact label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledInstance {
    pub entry_id: String,
    pub features: FeatureVector,
    pub is_supporting_fact: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassWeight {
    #[default]
    None,
    /// Each class contributes half of the total loss mass.
    Balanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub learning_rate: f64,
    pub iterations: usize,
    pub l2: f64,
    pub seed: u64,
    /// Permute instance order before fitting. Weights start at zero, so the
    /// order only changes floating-point summation order.
    pub shuffle: bool,
    pub class_weight: ClassWeight,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            learning_rate: 0.1,
            iterations: 2000,
            l2: 1e-4,
            seed: 0,
            shuffle: true,
            class_weight: ClassWeight::None,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FitError {
    #[error("cannot fit on zero instances")]
    Empty,
    #[error("degenerate fit: every training instance is {}", if *.positive { "positive" } else { "negative" })]
    SingleClass { positive: bool },
    #[error("{x} feature rows but {y} labels")]
    LengthMismatch { x: usize, y: usize },
}

/// Per-feature z-scoring fixed at fit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: [f64; DIM],
    /// Population standard deviation; constant columns get 1.
    pub std: [f64; DIM],
}

impl Standardizer {
    pub fn fit(x: &[[f64; DIM]]) -> Self {
        let n = x.len().max(1) as f64;
        let mut mean = [0.0; DIM];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = [0.0; DIM];
        for row in x {
            for j in 0..DIM {
                let d = row[j] - mean[j];
                var[j] += d * d;
            }
        }
        let mut std = [1.0; DIM];
        for j in 0..DIM {
            let s = (var[j] / n).sqrt();
            if s > 1e-12 {
                std[j] = s;
            }
        }
        Standardizer { mean, std }
    }

    pub fn apply(&self, row: &[f64; DIM]) -> [f64; DIM] {
        let mut out = [0.0; DIM];
        for j in 0..DIM {
            out[j] = (row[j] - self.mean[j]) / self.std[j];
        }
        out
    }
}

/// Coefficients in standardized feature space.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub w: [f64; DIM],
    pub b: f64,
}

// `libm` rather than the platform math library, so fitted weights are
// bit-identical on every target.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + libm::log1p(libm::exp(-z.abs()))
}

fn dot(w: &[f64; DIM], x: &[f64; DIM]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// L2-regularized mean negative log-likelihood over a fixed design.
///
/// `loss = (1/n) Σ c_i (softplus(z_i) - y_i z_i) + (l2/2) ‖w‖²` with
/// `z_i = w·x_i + b`. The bias is not regularized.
#[derive(Debug, Clone, Copy)]
pub struct Objective<'a> {
    pub x: &'a [[f64; DIM]],
    pub y: &'a [bool],
    /// Per-instance loss weights; `None` means all ones.
    pub weights: Option<&'a [f64]>,
    pub l2: f64,
}

impl Objective<'_> {
    fn weight(&self, i: usize) -> f64 {
        self.weights.map_or(1.0, |w| w[i])
    }

    pub fn loss(&self, p: &Params) -> f64 {
        let n = self.x.len() as f64;
        let mut total = 0.0;
        for (i, (row, &y)) in self.x.iter().zip(self.y).enumerate() {
            let z = dot(&p.w, row) + p.b;
            let nll = softplus(z) - if y { z } else { 0.0 };
            total += self.weight(i) * nll;
        }
        total / n + 0.5 * self.l2 * p.w.iter().map(|w| w * w).sum::<f64>()
    }

    pub fn gradient(&self, p: &Params) -> Params {
        let n = self.x.len() as f64;
        let mut g = Params::default();
        for (i, (row, &y)) in self.x.iter().zip(self.y).enumerate() {
            let r = self.weight(i) * (sigmoid(dot(&p.w, row) + p.b) - f64::from(u8::from(y)));
            for (gw, x) in g.w.iter_mut().zip(row) {
                *gw += r * x;
            }
            g.b += r;
        }
        for j in 0..DIM {
            g.w[j] = g.w[j] / n + self.l2 * p.w[j];
        }
        g.b /= n;
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub probability: f64,
    pub label: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CueModel {
    pub weights: [f64; DIM],
    pub bias: f64,
    pub standardizer: Standardizer,
}

impl CueModel {
    pub fn probability_raw(&self, row: &[f64; DIM]) -> f64 {
        sigmoid(dot(&self.weights, &self.standardizer.apply(row)) + self.bias)
    }

    pub fn predict_raw(&self, row: &[f64; DIM]) -> Prediction {
        let probability = self.probability_raw(row);
        Prediction { probability, label: probability > 0.5 }
    }

    pub fn predict(&self, features: &FeatureVector) -> Prediction {
        self.predict_raw(&features.to_array())
    }
}

pub fn fit(instances: &[LabeledInstance], config: &FitConfig) -> Result<CueModel, FitError> {
    let x: Vec<[f64; DIM]> = instances.iter().map(|i| i.features.to_array()).collect();
    let y: Vec<bool> = instances.iter().map(|i| i.is_supporting_fact).collect();
    fit_matrix(&x, &y, config)
}

pub fn fit_matrix(x: &[[f64; DIM]], y: &[bool], config: &FitConfig) -> Result<CueModel, FitError> {
    run(x, y, config, false).map(|(m, _)| m)
}

/// Like [`fit_matrix`], also returning the objective before the first step
/// and after every step.
pub fn fit_traced(
    x: &[[f64; DIM]],
    y: &[bool],
    config: &FitConfig,
) -> Result<(CueModel, Vec<f64>), FitError> {
    run(x, y, config, true)
}

fn run(
    x: &[[f64; DIM]],
    y: &[bool],
    config: &FitConfig,
    trace: bool,
) -> Result<(CueModel, Vec<f64>), FitError> {
    if x.len() != y.len() {
        return Err(FitError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if x.is_empty() {
        return Err(FitError::Empty);
    }
    let positives = y.iter().filter(|&&v| v).count();
    if positives == 0 || positives == y.len() {
        return Err(FitError::SingleClass { positive: positives > 0 });
    }

    let mut order: Vec<usize> = (0..x.len()).collect();
    if config.shuffle {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    }
    let standardizer = Standardizer::fit(x);
    let xs: Vec<[f64; DIM]> = order.iter().map(|&i| standardizer.apply(&x[i])).collect();
    let ys: Vec<bool> = order.iter().map(|&i| y[i]).collect();
    let weights: Option<Vec<f64>> = match config.class_weight {
        ClassWeight::None => None,
        ClassWeight::Balanced => {
            let n = y.len() as f64;
            let pos = n / (2.0 * positives as f64);
            let neg = n / (2.0 * (y.len() - positives) as f64);
            Some(ys.iter().map(|&v| if v { pos } else { neg }).collect())
        }
    };
    let objective = Objective { x: &xs, y: &ys, weights: weights.as_deref(), l2: config.l2 };

    let mut p = Params::default();
    let mut losses = Vec::new();
    if trace {
        losses.reserve(config.iterations + 1);
        losses.push(objective.loss(&p));
    }
    for _ in 0..config.iterations {
        let g = objective.gradient(&p);
        for j in 0..DIM {
            p.w[j] -= config.learning_rate * g.w[j];
        }
        p.b -= config.learning_rate * g.b;
        if trace {
            losses.push(objective.loss(&p));
        }
    }
    Ok((CueModel { weights: p.w, bias: p.b, standardizer }, losses))
}
