//! Synthetic corpus generator.
//!
//! Each participant gets a voice (pitch, spectral tilt, formants, breathiness)
//! drawn from a shared distribution; positive participants have their pitch,
//! tilt and breath noise shifted by configurable amounts. With every shift at
//! zero the two classes are acoustically indistinguishable.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::manifest::{write_manifest, SampleRecord, TestStatus};
use crate::audio::{self, AudioClip};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymptomEmission {
    pub name: String,
    pub p_positive: f64,
    pub p_negative: f64,
}

impl SymptomEmission {
    fn new(name: &str, p_positive: f64, p_negative: f64) -> Self {
        Self {
            name: name.to_string(),
            p_positive,
            p_negative,
        }
    }
}

pub fn default_symptom_emission() -> Vec<SymptomEmission> {
    vec![
        SymptomEmission::new("fever", 0.45, 0.15),
        SymptomEmission::new("chills", 0.25, 0.10),
        SymptomEmission::new("dry cough", 0.45, 0.30),
        SymptomEmission::new("wet cough", 0.15, 0.15),
        SymptomEmission::new("sore throat", 0.30, 0.30),
        SymptomEmission::new("runny or blocked nose", 0.20, 0.25),
        SymptomEmission::new("headache", 0.40, 0.25),
        SymptomEmission::new("muscle ache", 0.35, 0.15),
        SymptomEmission::new("shortness of breath", 0.20, 0.10),
        SymptomEmission::new("tightness in chest", 0.15, 0.10),
        SymptomEmission::new("loss of taste or smell", 0.40, 0.0),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub positive_participants: usize,
    pub negative_participants: usize,
    pub samples_per_participant: usize,
    pub sample_rate: u32,
    pub min_duration_s: f64,
    pub max_duration_s: f64,
    /// Added to the mean pitch of positive participants (Hz).
    pub f0_shift_hz: f64,
    /// Added to the glottal low-pass coefficient of positive participants.
    pub tilt_shift: f64,
    /// Added to the breath-noise level (relative to voiced RMS) of positives.
    pub breath_noise_shift: f64,
    /// Positive participants whose last sample is a later negative test.
    pub transitioned_participants: usize,
    pub symptoms: Vec<SymptomEmission>,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            positive_participants: 20,
            negative_participants: 20,
            samples_per_participant: 2,
            sample_rate: 16_000,
            min_duration_s: 1.0,
            max_duration_s: 2.0,
            f0_shift_hz: 40.0,
            tilt_shift: 0.1,
            breath_noise_shift: 0.15,
            transitioned_participants: 0,
            symptoms: default_symptom_emission(),
            seed: 7,
        }
    }
}

impl SynthConfig {
    /// Strong class separation in every acoustic knob.
    pub fn separable(seed: u64) -> Self {
        Self {
            f0_shift_hz: 70.0,
            tilt_shift: 0.15,
            breath_noise_shift: 0.3,
            seed,
            ..Self::default()
        }
    }

    /// No acoustic class difference at all.
    pub fn null_signal(seed: u64) -> Self {
        Self {
            f0_shift_hz: 0.0,
            tilt_shift: 0.0,
            breath_noise_shift: 0.0,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.positive_participants == 0 || self.negative_participants == 0 {
            return Err(Error::Config("need at least one participant per class".into()));
        }
        if self.samples_per_participant == 0 {
            return Err(Error::Config("samples_per_participant must be positive".into()));
        }
        if !(self.min_duration_s > 0.0 && self.min_duration_s <= self.max_duration_s) {
            return Err(Error::Config("need 0 < min_duration_s <= max_duration_s".into()));
        }
        if self.sample_rate < 8000 {
            return Err(Error::Config("sample_rate must be at least 8000".into()));
        }
        if self.transitioned_participants > self.positive_participants
            || (self.transitioned_participants > 0 && self.samples_per_participant < 2)
        {
            return Err(Error::Config(
                "transitioned participants need >= 2 samples and cannot exceed positives".into(),
            ));
        }
        for s in &self.symptoms {
            if !(0.0..=1.0).contains(&s.p_positive) || !(0.0..=1.0).contains(&s.p_negative) {
                return Err(Error::Config(format!("emission probability for {:?} outside [0, 1]", s.name)));
            }
        }
        Ok(())
    }
}

/// Acoustic identity of one synthetic speaker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoiceParams {
    pub f0_hz: f64,
    pub tilt: f64,
    pub breath: f64,
    pub formants: [f64; 2],
}

impl VoiceParams {
    fn draw(rng: &mut ChaCha8Rng, positive: bool, cfg: &SynthConfig) -> Self {
        let shift = if positive { 1.0 } else { 0.0 };
        Self {
            f0_hz: rng.random_range(110.0..190.0) + shift * cfg.f0_shift_hz,
            tilt: (rng.random_range(0.5..0.8) + shift * cfg.tilt_shift).clamp(0.0, 0.97),
            breath: (rng.random_range(0.05..0.15) + shift * cfg.breath_noise_shift).max(0.0),
            formants: [rng.random_range(500.0..750.0), rng.random_range(1100.0..1700.0)],
        }
    }
}

struct Resonator {
    a1: f64,
    a2: f64,
    y1: f64,
    y2: f64,
}

impl Resonator {
    fn new(freq: f64, bandwidth: f64, rate: f64) -> Self {
        let r = (-PI * bandwidth / rate).exp();
        Self {
            a1: 2.0 * r * (2.0 * PI * freq / rate).cos(),
            a2: -r * r,
            y1: 0.0,
            y2: 0.0,
        }
    }

    fn step(&mut self, x: f64) -> f64 {
        let y = x + self.a1 * self.y1 + self.a2 * self.y2;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64).sqrt()
}

/// Renders one utterance: jittered glottal pulses through a tilt filter and
/// two formant resonators, plus breath noise, a syllabic envelope, random
/// gain and low-level noise padding.
pub fn synth_utterance(voice: &VoiceParams, duration_s: f64, sample_rate: u32, rng: &mut ChaCha8Rng) -> AudioClip {
    let rate = sample_rate as f64;
    let n = (duration_s * rate).round() as usize;
    let unit = Normal::new(0.0, 1.0).expect("valid normal");
    let vibrato_phase = rng.random_range(0.0..2.0 * PI);
    let f0 = voice.f0_hz * rng.random_range(0.97..1.03);

    let mut f1 = Resonator::new(voice.formants[0], 90.0, rate);
    let mut f2 = Resonator::new(voice.formants[1], 130.0, rate);
    let mut phase = 0.0;
    let mut jitter = 1.0;
    let mut glottal = 0.0;
    let mut dc_x = 0.0;
    let mut dc_y = 0.0;
    let mut voiced: Vec<f64> = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / rate;
        let inst_f0 = f0 * (1.0 + 0.04 * (2.0 * PI * 2.5 * t + vibrato_phase).sin()) * jitter;
        phase += inst_f0 / rate;
        let pulse = if phase >= 1.0 {
            phase -= 1.0;
            jitter = 1.0 + 0.01 * unit.sample(rng);
            1.0 + 0.05 * unit.sample(rng)
        } else {
            0.0
        };
        glottal = pulse + voice.tilt * glottal;
        // DC blocker keeps the tilt filter from drifting.
        let hp = glottal - dc_x + 0.995 * dc_y;
        dc_x = glottal;
        dc_y = hp;
        let y = f2.step(f1.step(hp));
        voiced.push(y);
    }

    let level = rms(&voiced).max(1e-12);
    let syllable_rate = rng.random_range(3.0..5.0);
    let mut samples: Vec<f64> = voiced
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let t = i as f64 / rate;
            let env = 0.35 + 0.65 * (PI * syllable_rate * t).sin().abs().sqrt();
            let ramp = (t / 0.03).min((duration_s - t) / 0.03).clamp(0.0, 1.0);
            ramp * env * (v / level + voice.breath * unit.sample(rng))
        })
        .collect();

    let peak = samples.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-12);
    let gain = rng.random_range(0.3..0.9) / peak;
    for v in &mut samples {
        *v *= gain;
    }

    let floor = 3e-4;
    let pad = |secs: f64, rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..(secs * rate) as usize)
            .map(|_| floor * unit.sample(rng))
            .collect()
    };
    let lead = rng.random_range(0.15..0.35);
    let trail = rng.random_range(0.15..0.35);
    let mut out = pad(lead, rng);
    out.extend(samples);
    out.extend(pad(trail, rng));
    AudioClip::new(out.into_iter().map(|v| v.clamp(-1.0, 1.0)).collect(), sample_rate)
}

/// In-memory corpus: manifest records paired with their rendered clips.
pub fn synth_records(cfg: &SynthConfig) -> Result<Vec<(SampleRecord, AudioClip)>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let total = cfg.positive_participants + cfg.negative_participants;
    let mut out = Vec::with_capacity(total * cfg.samples_per_participant);
    let mut sample_no = 0usize;

    for p in 0..total {
        let positive = p < cfg.positive_participants;
        let transitioned = positive && p < cfg.transitioned_participants;
        let voice = VoiceParams::draw(&mut rng, positive, cfg);
        let symptoms: BTreeSet<String> = cfg
            .symptoms
            .iter()
            .filter(|s| {
                let prob = if positive { s.p_positive } else { s.p_negative };
                rng.random_bool(prob)
            })
            .map(|s| s.name.clone())
            .collect();
        let base_days: Option<u32> = if rng.random_bool(0.05) {
            None
        } else if positive {
            Some(rng.random_range(0..=30))
        } else {
            Some(rng.random_range(0..=90))
        };
        let hospitalized = positive && rng.random_bool(0.03);
        let participant_id = format!("p{:04}", p + 1);

        for k in 0..cfg.samples_per_participant {
            sample_no += 1;
            let sample_id = format!("s{sample_no:05}");
            let recovered = transitioned && k + 1 == cfg.samples_per_participant;
            let duration = rng.random_range(cfg.min_duration_s..=cfg.max_duration_s);
            let clip = synth_utterance(&voice, duration, cfg.sample_rate, &mut rng);
            let record = SampleRecord {
                sample_id: sample_id.clone(),
                participant_id: participant_id.clone(),
                audio_path: PathBuf::from(format!("audio/{sample_id}.wav")),
                test_status: if positive && !recovered {
                    TestStatus::Positive
                } else {
                    TestStatus::Negative
                },
                days_since_test: if recovered { Some(0) } else { base_days.map(|d| d + k as u32) },
                symptoms: if recovered { BTreeSet::new() } else { symptoms.clone() },
                hospitalized,
            };
            out.push((record, clip));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub manifest_path: PathBuf,
    pub records: Vec<SampleRecord>,
}

/// Writes `manifest.csv` and `audio/*.wav` (16-bit PCM) under `out_dir`.
pub fn synth_corpus(cfg: &SynthConfig, out_dir: impl AsRef<Path>) -> Result<SynthCorpus> {
    let out_dir = out_dir.as_ref();
    let items = synth_records(cfg)?;
    fs::create_dir_all(out_dir.join("audio"))?;
    for (record, clip) in &items {
        audio::write_wav_file(out_dir.join(&record.audio_path), clip)?;
    }
    let records: Vec<SampleRecord> = items.into_iter().map(|(r, _)| r).collect();
    let manifest_path = out_dir.join("manifest.csv");
    write_manifest(BufWriter::new(File::create(&manifest_path)?), &records)?;
    Ok(SynthCorpus {
        manifest_path,
        records,
    })
}
