use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::features::{FeatureVector, SymptomVector, FEATURE_DIM, SYMPTOM_DIM};

pub const FUSED_DIM: usize = FEATURE_DIM + SYMPTOM_DIM;

const SUM_TOLERANCE: f64 = 1e-6;

/// Two-class probability estimate from one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassProbabilities {
    pub negative: f64,
    pub positive: f64,
}

impl ClassProbabilities {
    pub fn new(negative: f64, positive: f64) -> Result<Self> {
        let p = Self { negative, positive };
        p.validate()?;
        Ok(p)
    }

    pub fn from_positive(positive: f64) -> Result<Self> {
        Self::new(1.0 - positive, positive)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && (0.0..=1.0).contains(&v);
        if !ok(self.negative) || !ok(self.positive) {
            return Err(Error::Distribution(format!(
                "probabilities must lie in [0, 1], got ({}, {})",
                self.negative, self.positive
            )));
        }
        if (self.negative + self.positive - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::Distribution(format!(
                "probabilities sum to {}, not 1",
                self.negative + self.positive
            )));
        }
        Ok(())
    }

    /// Most probable class and its probability; an even split is positive.
    pub fn top(&self) -> (Label, f64) {
        if self.positive >= self.negative {
            (Label::Positive, self.positive)
        } else {
            (Label::Negative, self.negative)
        }
    }
}

/// Voice features followed by the symptom indicators.
pub fn fuse_features(voice: &FeatureVector, symptoms: &SymptomVector) -> Vec<f64> {
    let mut out = Vec::with_capacity(FUSED_DIM);
    out.extend_from_slice(voice.as_slice());
    out.extend_from_slice(symptoms.as_slice());
    out
}

/// Prediction of whichever model is more confident in its own top class;
/// an exact tie goes to the voice model.
pub fn fuse_decisions(voice: &ClassProbabilities, symptom: &ClassProbabilities) -> Result<Label> {
    Ok(fuse_decisions_detailed(voice, symptom)?.0)
}

/// Like [`fuse_decisions`], also returning the winning model's
/// probability of the positive class.
pub fn fuse_decisions_detailed(voice: &ClassProbabilities, symptom: &ClassProbabilities) -> Result<(Label, f64)> {
    voice.validate()?;
    symptom.validate()?;
    let (vl, vp) = voice.top();
    let (sl, sp) = symptom.top();
    Ok(if sp > vp {
        (sl, symptom.positive)
    } else {
        (vl, voice.positive)
    })
}
