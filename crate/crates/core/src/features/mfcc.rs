use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::frames::hamming;
use super::FrameConfig;
use crate::error::Result;

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular filters over the one-sided power spectrum, equally spaced in mel.
/// Row `m` holds the weight of every FFT bin in band `m`.
pub fn mel_filterbank(
    bands: usize,
    fft_len: usize,
    sample_rate: u32,
    fmin: f64,
    fmax: f64,
) -> Vec<Vec<f64>> {
    let fmax = fmax.min(sample_rate as f64 / 2.0);
    let (mel_lo, mel_hi) = (hz_to_mel(fmin), hz_to_mel(fmax));
    let edges: Vec<f64> = (0..bands + 2)
        .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (bands + 1) as f64))
        .collect();
    let bins = fft_len / 2 + 1;
    let bin_hz = sample_rate as f64 / fft_len as f64;

    (0..bands)
        .map(|m| {
            let (lo, centre, hi) = (edges[m], edges[m + 1], edges[m + 2]);
            (0..bins)
                .map(|k| {
                    let f = k as f64 * bin_hz;
                    if f > lo && f <= centre {
                        (f - lo) / (centre - lo)
                    } else if f > centre && f < hi {
                        (hi - f) / (hi - centre)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Reusable MFCC pipeline for one frame length and sample rate: power
/// spectrum, mel filterbank, log, orthonormal DCT-II, coefficients 1..=count.
pub struct MfccExtractor {
    fft: Arc<dyn Fft<f64>>,
    fft_len: usize,
    filters: Vec<Vec<f64>>,
    /// Orthonormal DCT-II rows for coefficients 1..=count.
    dct: Vec<Vec<f64>>,
    window: Vec<f64>,
    log_floor: f64,
}

impl MfccExtractor {
    pub fn new(frame_len: usize, sample_rate: u32, cfg: &FrameConfig) -> Result<Self> {
        cfg.validate(sample_rate)?;
        let fft_len = frame_len.next_power_of_two();
        let bands = cfg.mel_bands;
        let scale = (2.0 / bands as f64).sqrt();
        let dct = (1..=cfg.mfcc_count)
            .map(|i| {
                (0..bands)
                    .map(|m| scale * (PI * i as f64 * (m as f64 + 0.5) / bands as f64).cos())
                    .collect()
            })
            .collect();
        Ok(Self {
            fft: FftPlanner::new().plan_fft_forward(fft_len),
            fft_len,
            filters: mel_filterbank(bands, fft_len, sample_rate, cfg.fmin, cfg.fmax),
            dct,
            window: hamming(frame_len),
            log_floor: cfg.log_floor,
        })
    }

    pub fn fft_len(&self) -> usize {
        self.fft_len
    }

    pub fn power_spectrum(&self, windowed: &[f64]) -> Vec<f64> {
        let mut buf = vec![Complex::new(0.0, 0.0); self.fft_len];
        for (slot, &x) in buf.iter_mut().zip(windowed) {
            slot.re = x;
        }
        self.fft.process(&mut buf);
        buf[..self.fft_len / 2 + 1]
            .iter()
            .map(|c| c.norm_sqr())
            .collect()
    }

    pub fn log_mel_energies(&self, windowed: &[f64]) -> Vec<f64> {
        let power = self.power_spectrum(windowed);
        self.filters
            .iter()
            .map(|filter| {
                let e: f64 = filter.iter().zip(&power).map(|(w, p)| w * p).sum();
                e.max(self.log_floor).ln()
            })
            .collect()
    }

    /// Cepstral coefficients 1..=count of an already windowed frame.
    pub fn compute_windowed(&self, windowed: &[f64]) -> Vec<f64> {
        let mut log_mel = self.log_mel_energies(windowed);
        // Coefficient 0 is dropped, so removing a constant offset leaves the
        // result unchanged analytically and makes flat spectra map to exact zeros.
        let offset = log_mel.iter().copied().fold(f64::INFINITY, f64::min);
        for v in &mut log_mel {
            *v -= offset;
        }
        self.dct
            .iter()
            .map(|row| row.iter().zip(&log_mel).map(|(c, v)| c * v).sum())
            .collect()
    }

    /// Cepstral coefficients of a raw frame (the Hamming window is applied here).
    pub fn compute(&self, raw: &[f64]) -> Vec<f64> {
        let windowed: Vec<f64> = raw.iter().zip(&self.window).map(|(x, w)| x * w).collect();
        self.compute_windowed(&windowed)
    }
}

pub fn lld_mfcc(raw_frame: &[f64], sample_rate: u32, cfg: &FrameConfig) -> Result<Vec<f64>> {
    Ok(MfccExtractor::new(raw_frame.len(), sample_rate, cfg)?.compute(raw_frame))
}
