//! Sigmoid calibration of decision values.

use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};

const MAX_ITER: usize = 100;
const MIN_STEP: f64 = 1e-10;
const HESSIAN_RIDGE: f64 = 1e-12;
const GRAD_EPS: f64 = 1e-5;
const INITIAL_SLOPE: f64 = -1e-3;

/// `P(positive | s) = 1 / (1 + exp(a·s + b))`, with `a < 0` so probability
/// rises with the decision value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlattParams {
    pub a: f64,
    pub b: f64,
}

impl PlattParams {
    pub fn probability(&self, score: f64) -> f64 {
        let z = self.a * score + self.b;
        // Evaluated on the side that cannot overflow; clamped away from 0 and 1.
        let p = if z >= 0.0 {
            let e = (-z).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + z.exp())
        };
        p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
    }
}

fn objective(scores: &[f64], targets: &[f64], a: f64, b: f64) -> f64 {
    scores
        .iter()
        .zip(targets)
        .map(|(s, t)| {
            let z = s * a + b;
            if z >= 0.0 {
                t * z + (1.0 + (-z).exp()).ln()
            } else {
                (t - 1.0) * z + (1.0 + z.exp()).ln()
            }
        })
        .sum()
}

/// Maximum-likelihood sigmoid fit with smoothed targets
/// `t₊ = (N₊+1)/(N₊+2)`, `t₋ = 1/(N₋+2)`, by Newton's method with
/// backtracking. Steps that would make `a` non-negative are shortened, so the
/// returned slope is always strictly negative.
pub fn fit_platt(scores: &[f64], labels: &[Label]) -> Result<PlattParams> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidInput("scores and labels differ in length".into()));
    }
    let n_pos = labels.iter().filter(|l| **l == Label::Positive).count() as f64;
    let n_neg = labels.len() as f64 - n_pos;
    if n_pos < 2.0 || n_neg < 2.0 {
        return Err(Error::InvalidInput(format!(
            "Platt scaling needs at least 2 samples per class, got {n_pos} positive / {n_neg} negative"
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidInput("non-finite decision value".into()));
    }

    let hi = (n_pos + 1.0) / (n_pos + 2.0);
    let lo = 1.0 / (n_neg + 2.0);
    let targets: Vec<f64> = labels
        .iter()
        .map(|l| if *l == Label::Positive { hi } else { lo })
        .collect();

    let mut a = INITIAL_SLOPE;
    let mut b = ((n_neg + 1.0) / (n_pos + 1.0)).ln();
    let mut fval = objective(scores, &targets, a, b);

    for _ in 0..MAX_ITER {
        let (mut h11, mut h22, mut h21) = (HESSIAN_RIDGE, HESSIAN_RIDGE, 0.0);
        let (mut g1, mut g2) = (0.0, 0.0);
        for (s, t) in scores.iter().zip(&targets) {
            let z = s * a + b;
            let (p, q) = if z >= 0.0 {
                let e = (-z).exp();
                (e / (1.0 + e), 1.0 / (1.0 + e))
            } else {
                let e = z.exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            };
            let d2 = p * q;
            h11 += s * s * d2;
            h22 += d2;
            h21 += s * d2;
            let d1 = t - p;
            g1 += s * d1;
            g2 += d1;
        }
        if g1.abs() < GRAD_EPS && g2.abs() < GRAD_EPS {
            break;
        }

        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let gd = g1 * da + g2 * db;

        let mut step = 1.0;
        let mut accepted = false;
        while step >= MIN_STEP {
            let (na, nb) = (a + step * da, b + step * db);
            if na < 0.0 {
                let nf = objective(scores, &targets, na, nb);
                if nf < fval + 1e-4 * step * gd {
                    a = na;
                    b = nb;
                    fval = nf;
                    accepted = true;
                    break;
                }
            }
            step /= 2.0;
        }
        if !accepted {
            break;
        }
    }
    Ok(PlattParams { a, b })
}
