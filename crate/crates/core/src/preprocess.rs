//! Recording clean-up before feature extraction: leading/trailing silence
//! trimming, peak normalization, and rejection of clips without speech.

use serde::{Deserialize, Serialize};

use crate::audio::AudioClip;
use crate::error::{Error, Result};
use crate::features::{self, FrameConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessConfig {
    /// Silence threshold relative to the loudest frame's RMS.
    pub trim_threshold_db: f64,
    pub trim_frame_ms: f64,
    pub min_duration_s: f64,
    pub min_voiced_ratio: f64,
    pub target_peak: f64,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            trim_threshold_db: -35.0,
            trim_frame_ms: 10.0,
            min_duration_s: 0.5,
            min_voiced_ratio: 0.02,
            target_peak: 0.999,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.trim_threshold_db < 0.0) {
            return Err(Error::Config("trim_threshold_db must be negative".into()));
        }
        if !(self.trim_frame_ms > 0.0) {
            return Err(Error::Config("trim_frame_ms must be positive".into()));
        }
        if !(self.min_voiced_ratio > 0.0 && self.min_voiced_ratio < 1.0) {
            return Err(Error::Config("min_voiced_ratio must lie in (0, 1)".into()));
        }
        if !(self.target_peak > 0.0 && self.target_peak <= 1.0) {
            return Err(Error::Config("target_peak must lie in (0, 1]".into()));
        }
        if !(self.min_duration_s >= 0.0) {
            return Err(Error::Config("min_duration_s must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateReason {
    Ok,
    TooShort,
    NoSpeech,
}

impl GateReason {
    pub fn as_str(self) -> &'static str {
        match self {
            GateReason::Ok => "ok",
            GateReason::TooShort => "too_short",
            GateReason::NoSpeech => "no_speech",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeechGateVerdict {
    pub accepted: bool,
    pub voiced_ratio: f64,
    pub duration_s: f64,
    pub reason: GateReason,
}

/// Removes leading and trailing runs of non-overlapping frames whose RMS is
/// more than `trim_threshold_db` below the loudest frame. Returns an empty
/// clip when nothing reaches the threshold.
pub fn trim_silence(clip: &AudioClip, cfg: &PreprocessConfig) -> AudioClip {
    let frame_len = ((clip.sample_rate as f64 * cfg.trim_frame_ms / 1000.0).round() as usize).max(1);
    let rms: Vec<f64> = clip
        .samples
        .chunks(frame_len)
        .map(features::lld_rms)
        .collect();
    let peak = rms.iter().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return AudioClip::new(Vec::new(), clip.sample_rate);
    }
    let threshold = peak * 10f64.powf(cfg.trim_threshold_db / 20.0);
    let loud = |r: &f64| *r >= threshold;
    let first = rms.iter().position(loud).expect("peak frame is loud");
    let last = rms.iter().rposition(loud).expect("peak frame is loud");
    let start = first * frame_len;
    let end = ((last + 1) * frame_len).min(clip.len());
    AudioClip::new(clip.samples[start..end].to_vec(), clip.sample_rate)
}

/// Scales the clip so its largest absolute sample equals `target_peak`.
pub fn peak_normalize(clip: &AudioClip, cfg: &PreprocessConfig) -> AudioClip {
    let peak = clip.peak();
    if peak == 0.0 {
        return clip.clone();
    }
    let gain = cfg.target_peak / peak;
    AudioClip::new(
        clip.samples.iter().map(|s| s * gain).collect(),
        clip.sample_rate,
    )
}

/// Accepts clips that are long enough and contain enough voiced frames.
pub fn speech_gate(
    clip: &AudioClip,
    cfg: &PreprocessConfig,
    frame_cfg: &FrameConfig,
) -> Result<SpeechGateVerdict> {
    let duration_s = clip.duration_s();
    if duration_s < cfg.min_duration_s || clip.is_empty() {
        return Ok(SpeechGateVerdict {
            accepted: false,
            voiced_ratio: 0.0,
            duration_s,
            reason: GateReason::TooShort,
        });
    }
    let voiced_ratio = match features::voiced_ratio(clip, frame_cfg) {
        Ok(r) => r,
        Err(Error::TooShort { .. }) => {
            return Ok(SpeechGateVerdict {
                accepted: false,
                voiced_ratio: 0.0,
                duration_s,
                reason: GateReason::TooShort,
            })
        }
        Err(e) => return Err(e),
    };
    let accepted = voiced_ratio >= cfg.min_voiced_ratio;
    Ok(SpeechGateVerdict {
        accepted,
        voiced_ratio,
        duration_s,
        reason: if accepted {
            GateReason::Ok
        } else {
            GateReason::NoSpeech
        },
    })
}

/// Trim, normalize and gate in one pass. The returned clip is the
/// normalized one whether or not the gate accepted it.
pub fn preprocess(
    clip: &AudioClip,
    cfg: &PreprocessConfig,
    frame_cfg: &FrameConfig,
) -> Result<(AudioClip, SpeechGateVerdict)> {
    cfg.validate()?;
    let trimmed = trim_silence(clip, cfg);
    let normalized = peak_normalize(&trimmed, cfg);
    let verdict = speech_gate(&normalized, cfg, frame_cfg)?;
    Ok((normalized, verdict))
}
