use std::f64::consts::PI;

use crate::audio::AudioClip;
use crate::error::{Error, Result};

use super::FrameConfig;

/// Short-time analysis frames of one clip.
///
/// `raw` frames feed ZCR, RMS and the autocorrelation descriptors; `windowed`
/// frames (Hamming) feed the spectral ones.
#[derive(Debug, Clone)]
pub struct FrameSet {
    pub frame_len: usize,
    pub hop: usize,
    pub sample_rate: u32,
    pub raw: Vec<Vec<f64>>,
    pub windowed: Vec<Vec<f64>>,
}

impl FrameSet {
    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }
}

pub fn frame_length(sample_rate: u32, cfg: &FrameConfig) -> usize {
    (sample_rate as f64 * cfg.frame_ms / 1000.0).round() as usize
}

pub fn hop_length(sample_rate: u32, cfg: &FrameConfig) -> usize {
    (sample_rate as f64 * cfg.hop_ms / 1000.0).round() as usize
}

pub fn hamming(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    (0..len)
        .map(|n| 0.54 - 0.46 * (2.0 * PI * n as f64 / (len - 1) as f64).cos())
        .collect()
}

/// Number of complete frames: `floor((n - frame_len) / hop) + 1`.
pub fn frame_count(samples: usize, frame_len: usize, hop: usize) -> usize {
    if samples < frame_len {
        0
    } else {
        (samples - frame_len) / hop + 1
    }
}

/// Splits a clip into overlapping frames.
pub fn frame_signal(clip: &AudioClip, cfg: &FrameConfig) -> Result<FrameSet> {
    cfg.validate(clip.sample_rate)?;
    let frame_len = frame_length(clip.sample_rate, cfg);
    let hop = hop_length(clip.sample_rate, cfg);
    let count = frame_count(clip.len(), frame_len, hop);
    if count == 0 {
        return Err(Error::TooShort {
            samples: clip.len(),
            required: frame_len,
        });
    }

    let window = hamming(frame_len);
    let mut raw = Vec::with_capacity(count);
    let mut windowed = Vec::with_capacity(count);
    for i in 0..count {
        let frame = &clip.samples[i * hop..i * hop + frame_len];
        windowed.push(frame.iter().zip(&window).map(|(x, w)| x * w).collect());
        raw.push(frame.to_vec());
    }
    Ok(FrameSet {
        frame_len,
        hop,
        sample_rate: clip.sample_rate,
        raw,
        windowed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_counts() {
        let cfg = FrameConfig::default();
        let one_second = AudioClip::new(vec![0.1; 16000], 16000);
        let frames = frame_signal(&one_second, &cfg).unwrap();
        assert_eq!(frames.len(), 98);
        assert_eq!(frames.frame_len, 400);
        assert_eq!(frames.hop, 160);

        let exact = AudioClip::new(vec![0.1; 400], 16000);
        assert_eq!(frame_signal(&exact, &cfg).unwrap().len(), 1);

        let short = AudioClip::new(vec![0.1; 399], 16000);
        assert!(matches!(
            frame_signal(&short, &cfg),
            Err(Error::TooShort {
                samples: 399,
                required: 400
            })
        ));
    }

    #[test]
    fn hamming_endpoints() {
        let w = hamming(400);
        assert!((w[0] - 0.08).abs() < 1e-12);
        assert!((w[399] - 0.08).abs() < 1e-12);
        assert!(w.iter().all(|&v| v > 0.0 && v <= 1.0));
    }
}
