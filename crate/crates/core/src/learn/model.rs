use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::platt::{fit_platt, PlattParams};
use super::smote::{smote, SmoteConfig};
use super::standardize::Standardizer;
use super::svm::{train_linear_svm, SvmConfig};
use crate::dataset::Label;
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub svm: SvmConfig,
    pub smote_k: usize,
    /// Internal folds producing held-out decision values for calibration.
    pub platt_folds: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            svm: SvmConfig::default(),
            smote_k: 5,
            platt_folds: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub task: Option<String>,
    pub method: Option<String>,
    pub config: TrainConfig,
    pub converged: bool,
    pub iterations: usize,
    pub training_samples: usize,
    pub synthetic_samples: usize,
}

/// Standardizer + linear SVM + Platt sigmoid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub feature_dim: usize,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub standardizer: Standardizer,
    pub platt: PlattParams,
    pub meta: ModelMeta,
}

impl TrainedModel {
    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.feature_dim {
            return Err(Error::InvalidInput(format!(
                "model expects {} features, got {}",
                self.feature_dim,
                x.len()
            )));
        }
        Ok(())
    }

    /// `w · standardize(x) + b`.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(decision_standardized(&self.weights, self.bias, &self.standardizer.transform(x)))
    }

    /// Hard label from the decision sign; a zero score is positive.
    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        Ok(Label::from_score(self.decision_value(x)?))
    }

    pub fn probability(&self, x: &[f64]) -> Result<f64> {
        Ok(self.platt.probability(self.decision_value(x)?))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported model format version {}",
                model.format_version
            )));
        }
        if model.weights.len() != model.feature_dim || model.standardizer.dim() != model.feature_dim {
            return Err(Error::InvalidInput("model dimensions are inconsistent".into()));
        }
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

fn decision_standardized(weights: &[f64], bias: f64, z: &[f64]) -> f64 {
    weights.iter().zip(z).map(|(w, v)| w * v).sum::<f64>() + bias
}

struct LinearFit {
    weights: Vec<f64>,
    bias: f64,
    converged: bool,
    iterations: usize,
    synthetic: usize,
}

/// SMOTE then SVM on already standardized rows.
fn fit_balanced(z: &[Vec<f64>], labels: &[Label], svm: &SvmConfig, smote_k: usize, seed: u64) -> Result<LinearFit> {
    let balanced = smote(z, labels, &SmoteConfig { k: smote_k, seed })?;
    let sol = train_linear_svm(&balanced.features, &balanced.labels, svm)?;
    Ok(LinearFit {
        weights: sol.weights,
        bias: sol.bias,
        converged: sol.converged,
        iterations: sol.iterations,
        synthetic: balanced.synthetic,
    })
}

/// Stratified split of row indices into `k` folds.
fn stratified_folds(labels: &[Label], k: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut offset = 0;
    for class in [Label::Positive, Label::Negative] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        for (n, i) in idx.into_iter().enumerate() {
            folds[(n + offset) % k].push(i);
        }
        offset += 1;
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    folds
}

/// Held-out decision values from internal stratified cross-validation, or
/// in-sample values when a class is too small to split.
fn calibration_scores(z: &[Vec<f64>], labels: &[Label], cfg: &TrainConfig, full: &LinearFit) -> Result<Vec<f64>> {
    let min_class = labels
        .iter()
        .filter(|l| **l == Label::Positive)
        .count()
        .min(labels.iter().filter(|l| **l == Label::Negative).count());
    if cfg.platt_folds < 2 || min_class < cfg.platt_folds {
        return Ok(z
            .iter()
            .map(|r| decision_standardized(&full.weights, full.bias, r))
            .collect());
    }
    let folds = stratified_folds(labels, cfg.platt_folds, cfg.seed ^ 0x9E37_79B9_7F4A_7C15);
    let mut scores = vec![0.0; z.len()];
    for (f, held_out) in folds.iter().enumerate() {
        let mut mask = vec![false; z.len()];
        for &i in held_out {
            mask[i] = true;
        }
        let train_z: Vec<Vec<f64>> = (0..z.len()).filter(|&i| !mask[i]).map(|i| z[i].clone()).collect();
        let train_y: Vec<Label> = (0..z.len()).filter(|&i| !mask[i]).map(|i| labels[i]).collect();
        let fit = fit_balanced(&train_z, &train_y, &cfg.svm, cfg.smote_k, cfg.seed.wrapping_add(f as u64 + 1))?;
        for &i in held_out {
            scores[i] = decision_standardized(&fit.weights, fit.bias, &z[i]);
        }
    }
    Ok(scores)
}

/// Full training pipeline: fit the standardizer, SMOTE the standardized
/// rows, train the SVM, then calibrate on held-out internal-CV scores.
pub fn train_model(x: &[Vec<f64>], labels: &[Label], cfg: &TrainConfig) -> Result<TrainedModel> {
    cfg.svm.validate()?;
    if x.len() != labels.len() {
        return Err(Error::InvalidInput("features and labels differ in length".into()));
    }
    let standardizer = Standardizer::fit(x)?;
    let z = standardizer.transform_all(x);
    let full = fit_balanced(&z, labels, &cfg.svm, cfg.smote_k, cfg.seed)?;
    let scores = calibration_scores(&z, labels, cfg, &full)?;
    let platt = fit_platt(&scores, labels)?;

    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        feature_dim: standardizer.dim(),
        weights: full.weights,
        bias: full.bias,
        standardizer,
        platt,
        meta: ModelMeta {
            task: None,
            method: None,
            config: *cfg,
            converged: full.converged,
            iterations: full.iterations,
            training_samples: x.len(),
            synthetic_samples: full.synthetic,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize) -> (Vec<Vec<f64>>, Vec<Label>) {
        let x: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let t = i as f64;
                let shift = if i % 3 == 0 { 2.0 } else { -1.0 };
                vec![100.0 + 10.0 * (shift + (t * 0.7).sin()), 0.01 * (t * 1.9).cos()]
            })
            .collect();
        let y = (0..n)
            .map(|i| if i % 3 == 0 { Label::Positive } else { Label::Negative })
            .collect();
        (x, y)
    }

    #[test]
    fn mean_vector_scores_bias() {
        let (x, y) = toy(12);
        let mut m = train_model(&x, &y, &TrainConfig::default()).unwrap();
        m.bias = 0.5;
        let mean = m.standardizer.mean.clone();
        assert!((m.decision_value(&mean).unwrap() - 0.5).abs() < 1e-12);

        m.weights = vec![0.0; 2];
        m.bias = 0.0;
        assert_eq!(m.decision_value(&x[1]).unwrap(), 0.0);
        assert_eq!(m.predict(&x[1]).unwrap(), Label::Positive);
    }

    #[test]
    fn learns_toy_problem_and_round_trips() {
        let (x, y) = toy(30);
        let m = train_model(&x, &y, &TrainConfig::default()).unwrap();
        let correct = x
            .iter()
            .zip(&y)
            .filter(|(r, l)| m.predict(r).unwrap() == **l)
            .count();
        assert!(correct >= 27, "{correct}");
        assert!(m.platt.a < 0.0);
        assert_eq!(m.meta.synthetic_samples, 10);
        let back = TrainedModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(m.decision_value(&[1.0]).is_err());
    }

    #[test]
    fn stratified_folds_cover_everything_once() {
        let y: Vec<Label> = (0..11)
            .map(|i| if i < 4 { Label::Positive } else { Label::Negative })
            .collect();
        let folds = stratified_folds(&y, 3, 5);
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..11).collect::<Vec<_>>());
        assert!(folds.iter().all(|f| f.iter().any(|&i| y[i] == Label::Positive)));
    }
}
