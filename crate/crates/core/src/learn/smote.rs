//! Synthetic minority oversampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};

/// Jitter applied when a lone minority point has to be duplicated.
const SINGLETON_JITTER: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoteConfig {
    pub k: usize,
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        Self { k: 5, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resampled {
    /// Original rows in input order, followed by the synthetic rows.
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
    pub synthetic: usize,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices (into `points`) of the `k` nearest other points of `points[i]`,
/// ties broken by index.
pub fn nearest_neighbors(points: &[&[f64]], i: usize, k: usize) -> Vec<usize> {
    let mut others: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, p)| (squared_distance(points[i], p), j))
        .collect();
    others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    others.into_iter().take(k).map(|(_, j)| j).collect()
}

/// Upsamples the minority class to the majority count.
///
/// Synthetic points are `x + u (nn - x)` with `u ~ U[0, 1)` and `nn` drawn
/// from the `k` nearest minority neighbours of `x`; base points are visited
/// round-robin. `k` shrinks to `count - 1` for small minorities, and a single
/// minority point is duplicated with 1e-6 jitter.
pub fn smote(features: &[Vec<f64>], labels: &[Label], cfg: &SmoteConfig) -> Result<Resampled> {
    if features.len() != labels.len() {
        return Err(Error::InvalidInput("features and labels differ in length".into()));
    }
    if cfg.k == 0 {
        return Err(Error::Config("SMOTE needs k >= 1".into()));
    }
    let pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == Label::Positive).collect();
    let neg: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == Label::Negative).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::InvalidInput("SMOTE needs both classes present".into()));
    }
    let (minority, minority_label, deficit) = if pos.len() < neg.len() {
        let d = neg.len() - pos.len();
        (pos, Label::Positive, d)
    } else {
        let d = pos.len() - neg.len();
        (neg, Label::Negative, d)
    };

    let mut out_x = features.to_vec();
    let mut out_y = labels.to_vec();
    if deficit == 0 {
        return Ok(Resampled {
            features: out_x,
            labels: out_y,
            synthetic: 0,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<&[f64]> = minority.iter().map(|&i| features[i].as_slice()).collect();

    if points.len() == 1 {
        for _ in 0..deficit {
            out_x.push(
                points[0]
                    .iter()
                    .map(|v| v + rng.random_range(-SINGLETON_JITTER..=SINGLETON_JITTER))
                    .collect(),
            );
            out_y.push(minority_label);
        }
    } else {
        let k = cfg.k.min(points.len() - 1);
        let neighbors: Vec<Vec<usize>> = (0..points.len())
            .map(|i| nearest_neighbors(&points, i, k))
            .collect();
        for s in 0..deficit {
            let base = s % points.len();
            let nn = neighbors[base][rng.random_range(0..k)];
            let u: f64 = rng.random();
            out_x.push(
                points[base]
                    .iter()
                    .zip(points[nn])
                    .map(|(x, n)| x + u * (n - x))
                    .collect(),
            );
            out_y.push(minority_label);
        }
    }

    Ok(Resampled {
        features: out_x,
        labels: out_y,
        synthetic: deficit,
    })
}
