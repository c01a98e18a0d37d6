//! Time-domain frame descriptors: zero-crossing rate, RMS energy, and the
//! autocorrelation-based pitch and harmonics-to-noise ratio.

use super::FrameConfig;

/// Candidate peaks within this fraction of the best one are preferred when
/// they occur at a shorter lag, which suppresses octave-down errors.
const OCTAVE_PREFERENCE: f64 = 0.9;

/// Bounds keeping `v / (1 - v)` finite when converting a correlation to dB.
const HNR_ACF_EPS: f64 = 1e-12;

/// Fraction of adjacent sample pairs whose sign differs.
///
/// Zero samples inherit the sign of the last nonzero sample; leading zeros
/// have no sign and never count as a crossing.
pub fn lld_zcr(frame: &[f64]) -> f64 {
    if frame.len() < 2 {
        return 0.0;
    }
    let mut crossings = 0usize;
    let mut prev_sign = 0i8;
    for &x in frame {
        let sign = if x > 0.0 {
            1
        } else if x < 0.0 {
            -1
        } else {
            prev_sign
        };
        if sign != 0 && prev_sign != 0 && sign != prev_sign {
            crossings += 1;
        }
        if sign != 0 {
            prev_sign = sign;
        }
    }
    crossings as f64 / (frame.len() - 1) as f64
}

pub fn lld_rms(frame: &[f64]) -> f64 {
    if frame.is_empty() {
        return 0.0;
    }
    (frame.iter().map(|x| x * x).sum::<f64>() / frame.len() as f64).sqrt()
}

/// Normalized cross-correlation of the frame with itself shifted by `lag`,
/// computed over the overlapping part only. Zero when either part is silent.
pub fn normalized_acf(frame: &[f64], lag: usize) -> f64 {
    let n = frame.len();
    if lag >= n {
        return 0.0;
    }
    let head = &frame[..n - lag];
    let tail = &frame[lag..];
    let mut cross = 0.0;
    let mut e_head = 0.0;
    let mut e_tail = 0.0;
    for (a, b) in head.iter().zip(tail) {
        cross += a * b;
        e_head += a * a;
        e_tail += b * b;
    }
    let denom = (e_head * e_tail).sqrt();
    if denom > 0.0 {
        (cross / denom).clamp(-1.0, 1.0)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchEstimate {
    /// Fundamental frequency in Hz; 0 for unvoiced frames.
    pub f0: f64,
    pub voiced: bool,
    /// Normalized autocorrelation at the selected peak (0 if none).
    pub acf_peak: f64,
}

impl PitchEstimate {
    const UNVOICED: Self = Self {
        f0: 0.0,
        voiced: false,
        acf_peak: 0.0,
    };
}

/// Lag search range `[rate / f0_max, rate / f0_min]` in samples.
pub fn lag_range(sample_rate: u32, cfg: &FrameConfig) -> (usize, usize) {
    let rate = sample_rate as f64;
    let min_lag = ((rate / cfg.f0_max).floor() as usize).max(2);
    let max_lag = (rate / cfg.f0_min).ceil() as usize;
    (min_lag, max_lag)
}

/// Autocorrelation pitch estimate for one raw (unwindowed) frame.
///
/// Local maxima of the normalized ACF inside the lag range are candidates;
/// the shortest-lag candidate reaching 90% of the strongest one is taken and
/// refined by parabolic interpolation. The frame is voiced when the peak
/// correlation reaches `voicing_threshold`.
pub fn lld_f0(frame: &[f64], sample_rate: u32, cfg: &FrameConfig) -> PitchEstimate {
    let (min_lag, max_lag) = lag_range(sample_rate, cfg);
    let n = frame.len();
    if n < 4 || min_lag + 2 > n {
        return PitchEstimate::UNVOICED;
    }
    let max_lag = max_lag.min(n - 2);
    if max_lag < min_lag {
        return PitchEstimate::UNVOICED;
    }

    // acf[i] holds lag (min_lag - 1 + i), so neighbours of every candidate exist.
    let first = min_lag - 1;
    let acf: Vec<f64> = (first..=max_lag + 1)
        .map(|lag| normalized_acf(frame, lag))
        .collect();
    let at = |lag: usize| acf[lag - first];

    let candidates: Vec<usize> = (min_lag..=max_lag)
        .filter(|&lag| at(lag) > at(lag - 1) && at(lag) >= at(lag + 1))
        .collect();
    let best = candidates.iter().map(|&l| at(l)).fold(f64::NEG_INFINITY, f64::max);
    if candidates.is_empty() || best <= 0.0 {
        return PitchEstimate::UNVOICED;
    }
    let lag = candidates
        .iter()
        .copied()
        .find(|&l| at(l) >= OCTAVE_PREFERENCE * best)
        .expect("best candidate satisfies its own threshold");
    let peak = at(lag);
    if peak < cfg.voicing_threshold {
        return PitchEstimate {
            f0: 0.0,
            voiced: false,
            acf_peak: peak,
        };
    }

    let (left, right) = (at(lag - 1), at(lag + 1));
    let curvature = left - 2.0 * peak + right;
    let shift = if curvature < 0.0 {
        (0.5 * (left - right) / curvature).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let f0 = (sample_rate as f64 / (lag as f64 + shift)).clamp(cfg.f0_min, cfg.f0_max);
    PitchEstimate {
        f0,
        voiced: true,
        acf_peak: peak,
    }
}

/// Harmonics-to-noise ratio in dB from a pitch estimate: `10 log10(v / (1 - v))`
/// for voiced frames, the lower clamp for unvoiced ones.
pub fn hnr_from_pitch(pitch: &PitchEstimate, cfg: &FrameConfig) -> f64 {
    if !pitch.voiced {
        return cfg.hnr_clamp_db.0;
    }
    hnr_from_acf(pitch.acf_peak, cfg)
}

pub fn hnr_from_acf(acf_peak: f64, cfg: &FrameConfig) -> f64 {
    let (lo, hi) = cfg.hnr_clamp_db;
    let v = acf_peak.clamp(HNR_ACF_EPS, 1.0 - HNR_ACF_EPS);
    (10.0 * (v / (1.0 - v)).log10()).clamp(lo, hi)
}

pub fn lld_hnr(frame: &[f64], sample_rate: u32, cfg: &FrameConfig) -> f64 {
    hnr_from_pitch(&lld_f0(frame, sample_rate, cfg), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::PI;

    fn tone(freq: f64, amp: f64, n: usize, rate: f64) -> Vec<f64> {
        (0..n)
            .map(|i| amp * (2.0 * PI * freq * i as f64 / rate).sin())
            .collect()
    }

    /// Direct simulation of sign changes on the sampled sine.
    fn count_crossings_oracle(x: &[f64]) -> usize {
        let nonzero: Vec<f64> = x.iter().copied().filter(|v| *v != 0.0).collect();
        nonzero
            .windows(2)
            .filter(|w| (w[0] > 0.0) != (w[1] > 0.0))
            .count()
    }

    #[test]
    fn zcr_examples() {
        assert_eq!(lld_zcr(&[0.3; 10]), 0.0);
        assert_eq!(lld_zcr(&[1.0, -1.0, 1.0, -1.0]), 1.0);
        assert_eq!(lld_zcr(&[0.0, 0.0, 1.0, 0.0, -1.0]), 0.25);

        let x = tone(440.0, 1.0, 400, 16000.0);
        let zcr = lld_zcr(&x);
        assert_eq!(zcr, count_crossings_oracle(&x) as f64 / 399.0);
        assert!((zcr - 22.0 / 399.0).abs() <= 0.003, "{zcr}");
    }

    #[test]
    fn rms_examples() {
        assert_eq!(lld_rms(&[0.0; 8]), 0.0);
        assert_eq!(lld_rms(&[-0.25; 8]), 0.25);
        // 400 samples hold exactly 5 periods of 200 Hz.
        let x = tone(200.0, 0.5, 400, 16000.0);
        // Trapezoid integration of a^2 sin^2 over one period.
        let steps = 100_000;
        let integral: f64 = (0..=steps)
            .map(|i| {
                let t = i as f64 / steps as f64;
                let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
                w * (0.5 * (2.0 * PI * t).sin()).powi(2)
            })
            .sum::<f64>()
            / steps as f64;
        assert!((lld_rms(&x) - integral.sqrt()).abs() < 1e-3);
        assert!((lld_rms(&x) - 0.35355).abs() < 1e-3);
    }

    #[test]
    fn pitch_of_pure_tones() {
        let cfg = FrameConfig::default();
        for f in [100.0, 150.0, 200.0, 300.0, 400.0] {
            let p = lld_f0(&tone(f, 0.8, 400, 16000.0), 16000, &cfg);
            assert!(p.voiced, "{f} Hz unvoiced");
            assert!((p.f0 - f).abs() <= 0.05 * f, "{f} Hz estimated as {}", p.f0);
        }
        let p = lld_f0(&tone(200.0, 0.8, 400, 16000.0), 16000, &cfg);
        assert!((p.f0 - 200.0).abs() <= 4.0);
    }

    #[test]
    fn silent_frame_is_unvoiced() {
        let cfg = FrameConfig::default();
        let p = lld_f0(&[0.0; 400], 16000, &cfg);
        assert_eq!(p, PitchEstimate::UNVOICED);
        assert_eq!(lld_hnr(&[0.0; 400], 16000, &cfg), -100.0);
    }

    #[test]
    fn white_noise_mostly_unvoiced_with_negative_hnr() {
        let cfg = FrameConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut unvoiced = 0;
        let mut low_hnr = 0;
        for _ in 0..100 {
            let frame: Vec<f64> = (0..400)
                .map(|_| { let z: f64 = StandardNormal.sample(&mut rng); 0.3 * z })
                .collect();
            if !lld_f0(&frame, 16000, &cfg).voiced {
                unvoiced += 1;
            }
            if lld_hnr(&frame, 16000, &cfg) <= 0.0 {
                low_hnr += 1;
            }
        }
        assert!(unvoiced >= 95, "{unvoiced}");
        assert!(low_hnr >= 95, "{low_hnr}");
    }

    #[test]
    fn hnr_reference_points() {
        let cfg = FrameConfig::default();
        assert_eq!(hnr_from_acf(0.5, &cfg), 0.0);
        assert_eq!(hnr_from_acf(1.0, &cfg), 100.0);
        // 200 Hz has an integer period at 16 kHz, so the peak correlation is 1.
        assert_eq!(lld_hnr(&tone(200.0, 0.5, 400, 16000.0), 16000, &cfg), 100.0);
    }
}
