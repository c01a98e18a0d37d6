//! Per-recording extraction: decode, standardize, clean up, gate, extract.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audio::{self, AudioClip, TARGET_RATE};
use crate::dataset::{Label, Manifest};
use crate::error::Result;
use crate::features::{extract_is09, FeatureVector, FrameConfig};
use crate::preprocess::{preprocess, PreprocessConfig, SpeechGateVerdict};
use crate::store::{FeatureRow, FeatureStore};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionConfig {
    pub preprocess: PreprocessConfig,
    pub frame: FrameConfig,
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<()> {
        self.preprocess.validate()?;
        self.frame.validate(TARGET_RATE)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClipOutcome {
    Accepted {
        features: FeatureVector,
        verdict: SpeechGateVerdict,
    },
    Rejected {
        verdict: SpeechGateVerdict,
    },
}

/// Runs preprocessing and, if the gate accepts, feature extraction on a clip
/// at any sample rate.
pub fn extract_clip(clip: &AudioClip, cfg: &ExtractionConfig) -> Result<ClipOutcome> {
    let clip = if clip.sample_rate == TARGET_RATE || clip.is_empty() {
        clip.clone()
    } else {
        audio::resample(clip, TARGET_RATE)?
    };
    let (cleaned, verdict) = preprocess(&clip, &cfg.preprocess, &cfg.frame)?;
    if !verdict.accepted {
        return Ok(ClipOutcome::Rejected { verdict });
    }
    Ok(ClipOutcome::Accepted {
        features: extract_is09(&cleaned, &cfg.frame)?,
        verdict,
    })
}

pub fn extract_file(path: impl AsRef<Path>, cfg: &ExtractionConfig) -> Result<ClipOutcome> {
    extract_clip(&audio::load_standardized(path)?, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub sample_id: String,
    pub participant_id: String,
    /// Gate reason (`too_short`, `no_speech`) or `error`.
    pub reason: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionReport {
    pub store: FeatureStore,
    pub rejections: Vec<Rejection>,
}

impl ExtractionReport {
    pub fn write_rejections<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["sample_id", "participant_id", "reason", "detail"])?;
        for r in &self.rejections {
            w.write_record([&r.sample_id, &r.participant_id, &r.reason, &r.detail])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Extracts every manifest row concurrently. Row-level failures (missing or
/// undecodable audio) are reported as rejections; output keeps manifest order.
pub fn extract_manifest(manifest: &Manifest, cfg: &ExtractionConfig) -> Result<ExtractionReport> {
    cfg.validate()?;
    let outcomes: Vec<Result<ClipOutcome>> = manifest
        .records
        .par_iter()
        .map(|r| extract_file(manifest.audio_path(r), cfg))
        .collect();

    let mut store = FeatureStore::default();
    let mut rejections = Vec::new();
    for (record, outcome) in manifest.records.iter().zip(outcomes) {
        let reject = |reason: &str, detail: String| Rejection {
            sample_id: record.sample_id.clone(),
            participant_id: record.participant_id.clone(),
            reason: reason.to_string(),
            detail,
        };
        match outcome {
            Ok(ClipOutcome::Accepted { features, .. }) => store.push(FeatureRow {
                sample_id: record.sample_id.clone(),
                participant_id: record.participant_id.clone(),
                label: Label::from(record.test_status),
                features,
            })?,
            Ok(ClipOutcome::Rejected { verdict }) => {
                log::info!("{}: rejected ({})", record.sample_id, verdict.reason.as_str());
                rejections.push(reject(
                    verdict.reason.as_str(),
                    format!("duration {:.3} s, voiced ratio {:.3}", verdict.duration_s, verdict.voiced_ratio),
                ));
            }
            Err(e) => {
                log::warn!("{}: {e}", record.sample_id);
                rejections.push(reject("error", e.to_string()));
            }
        }
    }
    Ok(ExtractionReport { store, rejections })
}
