//! IS09-style paralinguistic features: 16 frame-level descriptors and their
//! deltas, each summarised by 12 functionals (384 values per clip), plus the
//! one-hot symptom encoding.

pub mod frames;
pub mod functionals;
pub mod lld;
pub mod mfcc;
pub mod symptoms;

use serde::{Deserialize, Serialize};

use crate::audio::AudioClip;
use crate::error::{Error, Result};

pub use frames::{frame_signal, FrameSet};
pub use functionals::{delta, functionals, FUNCTIONAL_COUNT, FUNCTIONAL_NAMES};
pub use lld::{lld_f0, lld_hnr, lld_rms, lld_zcr, PitchEstimate};
pub use mfcc::{lld_mfcc, MfccExtractor};
pub use symptoms::{encode_symptoms, SymptomVector, SymptomVocabulary, SYMPTOM_DIM};

pub const LLD_COUNT: usize = 16;
pub const TRACK_COUNT: usize = 2 * LLD_COUNT;
pub const FEATURE_DIM: usize = TRACK_COUNT * FUNCTIONAL_COUNT;

pub const LLD_NAMES: [&str; LLD_COUNT] = [
    "zcr", "rms", "f0", "hnr", "mfcc1", "mfcc2", "mfcc3", "mfcc4", "mfcc5", "mfcc6", "mfcc7",
    "mfcc8", "mfcc9", "mfcc10", "mfcc11", "mfcc12",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Hamming,
}

/// Short-time analysis parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrameConfig {
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub window: WindowKind,
    pub mel_bands: usize,
    pub mfcc_count: usize,
    pub fmin: f64,
    pub fmax: f64,
    pub f0_min: f64,
    pub f0_max: f64,
    /// Minimum normalized autocorrelation peak for a voiced frame.
    pub voicing_threshold: f64,
    pub log_floor: f64,
    pub hnr_clamp_db: (f64, f64),
    pub delta_window: usize,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            frame_ms: 25.0,
            hop_ms: 10.0,
            window: WindowKind::Hamming,
            mel_bands: 26,
            mfcc_count: 12,
            fmin: 0.0,
            fmax: 8000.0,
            f0_min: 55.0,
            f0_max: 550.0,
            voicing_threshold: 0.45,
            log_floor: 1e-10,
            hnr_clamp_db: (-100.0, 100.0),
            delta_window: 2,
        }
    }
}

impl FrameConfig {
    pub fn validate(&self, sample_rate: u32) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.frame_ms > self.hop_ms && self.hop_ms > 0.0) {
            return bad(format!(
                "need frame_ms > hop_ms > 0, got {} / {}",
                self.frame_ms, self.hop_ms
            ));
        }
        if !(self.f0_min > 0.0 && self.f0_min < self.f0_max) {
            return bad(format!("need 0 < f0_min < f0_max, got {} / {}", self.f0_min, self.f0_max));
        }
        if self.f0_max > sample_rate as f64 / 2.0 {
            return bad(format!("f0_max {} exceeds Nyquist at {sample_rate} Hz", self.f0_max));
        }
        if self.mfcc_count == 0 || self.mel_bands < self.mfcc_count {
            return bad(format!(
                "need mel_bands >= mfcc_count > 0, got {} / {}",
                self.mel_bands, self.mfcc_count
            ));
        }
        if !(self.fmin >= 0.0 && self.fmin < self.fmax) {
            return bad(format!("need 0 <= fmin < fmax, got {} / {}", self.fmin, self.fmax));
        }
        if !(self.log_floor > 0.0) {
            return bad("log_floor must be positive".into());
        }
        if !(self.hnr_clamp_db.0 < self.hnr_clamp_db.1) {
            return bad("hnr clamp bounds out of order".into());
        }
        if !(0.0..=1.0).contains(&self.voicing_threshold) {
            return bad("voicing_threshold must lie in [0, 1]".into());
        }
        Ok(())
    }
}

/// The 384-value acoustic vector: for each of the 32 tracks (16 descriptors
/// in [`LLD_NAMES`] order, then their deltas) the 12 functionals in
/// [`FUNCTIONAL_NAMES`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() != FEATURE_DIM {
            return Err(Error::InvalidInput(format!(
                "feature vector has {} values, expected {FEATURE_DIM}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "feature {} ({}) is not finite",
                i,
                feature_names()[i]
            )));
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<FeatureVector> for Vec<f64> {
    fn from(v: FeatureVector) -> Self {
        v.0
    }
}

pub fn track_names() -> Vec<String> {
    LLD_NAMES
        .iter()
        .map(|n| n.to_string())
        .chain(LLD_NAMES.iter().map(|n| format!("{n}_de")))
        .collect()
}

/// Column names in feature-vector order, e.g. `mfcc3_de__linreg_slope`.
pub fn feature_names() -> Vec<String> {
    track_names()
        .iter()
        .flat_map(|t| FUNCTIONAL_NAMES.iter().map(move |f| format!("{t}__{f}")))
        .collect()
}

/// Frame-level descriptor matrix, one row per descriptor in [`LLD_NAMES`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct LldTrack {
    pub rows: Vec<Vec<f64>>,
    pub frame_count: usize,
}

pub fn compute_llds(clip: &AudioClip, cfg: &FrameConfig) -> Result<LldTrack> {
    let frames = frame_signal(clip, cfg)?;
    let mfcc = MfccExtractor::new(frames.frame_len, clip.sample_rate, cfg)?;
    let count = frames.len();
    let mut rows = vec![Vec::with_capacity(count); LLD_COUNT];
    for (raw, windowed) in frames.raw.iter().zip(&frames.windowed) {
        let pitch = lld_f0(raw, clip.sample_rate, cfg);
        rows[0].push(lld_zcr(raw));
        rows[1].push(lld_rms(raw));
        rows[2].push(pitch.f0);
        rows[3].push(lld::hnr_from_pitch(&pitch, cfg));
        for (i, c) in mfcc.compute_windowed(windowed).into_iter().enumerate() {
            rows[4 + i].push(c);
        }
    }
    Ok(LldTrack {
        rows,
        frame_count: count,
    })
}

/// Fraction of frames the pitch tracker marks voiced.
pub fn voiced_ratio(clip: &AudioClip, cfg: &FrameConfig) -> Result<f64> {
    let frames = frame_signal(clip, cfg)?;
    let voiced = frames
        .raw
        .iter()
        .filter(|f| lld_f0(f, clip.sample_rate, cfg).voiced)
        .count();
    Ok(voiced as f64 / frames.len() as f64)
}

/// Computes the 384-dimensional feature vector of a preprocessed clip.
pub fn extract_is09(clip: &AudioClip, cfg: &FrameConfig) -> Result<FeatureVector> {
    if cfg.mfcc_count != 12 {
        return Err(Error::Config(format!(
            "the 384-feature layout needs 12 MFCCs, got {}",
            cfg.mfcc_count
        )));
    }
    let llds = compute_llds(clip, cfg)?;
    let mut values = Vec::with_capacity(FEATURE_DIM);
    for row in &llds.rows {
        values.extend_from_slice(&functionals(row)?);
    }
    for row in &llds.rows {
        values.extend_from_slice(&functionals(&delta(row, cfg.delta_window))?);
    }
    FeatureVector::new(values)
}
