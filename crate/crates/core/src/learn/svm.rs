//! Linear soft-margin SVM trained in the dual.
//!
//! Solves `min ½‖w‖² + C Σ max(0, 1 − yᵢ(w·xᵢ + b))` with an unregularized
//! bias. The bias turns into the dual equality constraint `Σ αᵢyᵢ = 0`, so
//! coordinates are updated in maximal-violating pairs (second-order working
//! set selection) rather than one at a time.

use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};

/// Curvature floor for non-positive-definite pairs.
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub c: f64,
    /// Stopping threshold on the maximal KKT violation.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 0.01,
            tolerance: 1e-4,
            max_iterations: 10_000,
            seed: 0,
        }
    }
}

impl SvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Config(format!("SVM C must be positive, got {}", self.c)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("SVM tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("SVM max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmSolution {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Dual variables, each within `[0, C]`.
    pub alphas: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Maximal KKT violation at exit.
    pub kkt_gap: f64,
}

impl SvmSolution {
    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `½‖w‖² + C Σ hinge(yᵢ(w·xᵢ + b))`.
pub fn primal_objective(weights: &[f64], bias: f64, x: &[Vec<f64>], labels: &[Label], c: f64) -> f64 {
    let hinge: f64 = x
        .iter()
        .zip(labels)
        .map(|(xi, y)| (1.0 - y.sign() * (dot(weights, xi) + bias)).max(0.0))
        .sum();
    0.5 * dot(weights, weights) + c * hinge
}

pub fn train_linear_svm(x: &[Vec<f64>], labels: &[Label], cfg: &SvmConfig) -> Result<SvmSolution> {
    cfg.validate()?;
    let n = x.len();
    if n != labels.len() {
        return Err(Error::InvalidInput("features and labels differ in length".into()));
    }
    if !labels.contains(&Label::Positive) || !labels.contains(&Label::Negative) {
        return Err(Error::InvalidInput("SVM training needs both classes".into()));
    }
    let dim = x[0].len();
    if x.iter().any(|r| r.len() != dim) {
        return Err(Error::InvalidInput("rows have inconsistent dimension".into()));
    }

    let c = cfg.c;
    let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let kernel: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| dot(&x[i], &x[j])).collect())
        .collect();
    let q = |i: usize, j: usize| y[i] * y[j] * kernel[i][j];

    let mut alpha = vec![0.0; n];
    // Gradient of ½αᵀQα − eᵀα.
    let mut grad = vec![-1.0; n];

    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

    let mut iterations = 0;
    let mut converged = false;
    let mut kkt_gap = f64::INFINITY;
    while iterations < cfg.max_iterations {
        let mut i = usize::MAX;
        let mut g_max = f64::NEG_INFINITY;
        for t in 0..n {
            if in_up(alpha[t], y[t]) && -y[t] * grad[t] >= g_max {
                g_max = -y[t] * grad[t];
                i = t;
            }
        }
        let mut g_min = f64::INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if !in_low(alpha[t], y[t]) {
                continue;
            }
            let v = -y[t] * grad[t];
            g_min = g_min.min(v);
            if i != usize::MAX && v < g_max {
                let b = g_max - v;
                let a = kernel[i][i] + kernel[t][t] - 2.0 * kernel[i][t];
                let score = -(b * b) / if a > 0.0 { a } else { TAU };
                if score <= best {
                    best = score;
                    j = t;
                }
            }
        }
        kkt_gap = g_max - g_min;
        if i == usize::MAX || j == usize::MAX || kkt_gap < cfg.tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = (kernel[i][i] + kernel[j][j] - 2.0 * kernel[i][j]).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (kernel[i][i] + kernel[j][j] - 2.0 * kernel[i][j]).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        alpha[i] = alpha[i].clamp(0.0, c);
        alpha[j] = alpha[j].clamp(0.0, c);

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(i, t) * di + q(j, t) * dj;
        }
    }
    if !converged {
        log::warn!(
            "SVM stopped after {} iterations with KKT gap {kkt_gap:.3e}",
            cfg.max_iterations
        );
    }

    // Bias: average over free vectors, else the midpoint of the feasible interval.
    let (mut upper, mut lower) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free_sum, mut free_count) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            free_sum += yg;
            free_count += 1;
        }
    }
    let rho = if free_count > 0 {
        free_sum / free_count as f64
    } else {
        0.5 * (upper + lower)
    };

    let mut weights = vec![0.0; dim];
    for (t, row) in x.iter().enumerate() {
        let coef = alpha[t] * y[t];
        if coef != 0.0 {
            for (w, v) in weights.iter_mut().zip(row) {
                *w += coef * v;
            }
        }
    }

    Ok(SvmSolution {
        weights,
        bias: -rho,
        alphas: alpha,
        iterations,
        converged,
        kkt_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_pair_boundary_at_origin() {
        let x = vec![vec![-1.0], vec![1.0]];
        let y = vec![Label::Negative, Label::Positive];
        let cfg = SvmConfig {
            c: 10.0,
            ..SvmConfig::default()
        };
        let s = train_linear_svm(&x, &y, &cfg).unwrap();
        // Max-margin solution: w = 1, b = 0.
        assert!((s.weights[0] - 1.0).abs() < 1e-6);
        let boundary = -s.bias / s.weights[0];
        assert!(boundary.abs() < 1e-3);
        assert!(s.decision(&x[0]) < 0.0 && s.decision(&x[1]) > 0.0);
        assert!(s.converged);
    }

    #[test]
    fn dual_feasibility_and_weight_identity() {
        let x: Vec<Vec<f64>> = (0..30)
            .map(|i| {
                let t = i as f64;
                vec![(t * 0.37).sin() + if i % 2 == 0 { 0.4 } else { -0.4 }, (t * 1.3).cos()]
            })
            .collect();
        let y: Vec<Label> = (0..30)
            .map(|i| if i % 2 == 0 { Label::Positive } else { Label::Negative })
            .collect();
        let cfg = SvmConfig {
            c: 0.5,
            ..SvmConfig::default()
        };
        let s = train_linear_svm(&x, &y, &cfg).unwrap();
        assert!(s.alphas.iter().all(|&a| (0.0..=cfg.c).contains(&a)));
        let balance: f64 = s.alphas.iter().zip(&y).map(|(a, l)| a * l.sign()).sum();
        assert!(balance.abs() < 1e-9);
        for d in 0..2 {
            let w: f64 = (0..30).map(|t| s.alphas[t] * y[t].sign() * x[t][d]).sum();
            assert!((w - s.weights[d]).abs() < 1e-9);
        }
    }

    #[test]
    fn single_class_rejected() {
        let x = vec![vec![0.0], vec![1.0]];
        let y = vec![Label::Positive, Label::Positive];
        assert!(train_linear_svm(&x, &y, &SvmConfig::default()).is_err());
        let bad = SvmConfig {
            c: 0.0,
            ..SvmConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
