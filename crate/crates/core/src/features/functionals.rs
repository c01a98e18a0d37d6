//! Delta regression and the 12 statistical functionals applied to every track.

use crate::error::{Error, Result};

pub const FUNCTIONAL_COUNT: usize = 12;

pub const FUNCTIONAL_NAMES: [&str; FUNCTIONAL_COUNT] = [
    "mean",
    "stddev",
    "kurtosis",
    "skewness",
    "min",
    "max",
    "rel_minpos",
    "rel_maxpos",
    "range",
    "linreg_offset",
    "linreg_slope",
    "linreg_mse",
];

/// Regression deltas over `±window` frames, replicating edge frames.
pub fn delta(track: &[f64], window: usize) -> Vec<f64> {
    let n = track.len();
    if n == 0 || window == 0 {
        return vec![0.0; n];
    }
    let denom = 2.0 * (1..=window).map(|w| (w * w) as f64).sum::<f64>();
    let last = n as isize - 1;
    let at = |i: isize| track[i.clamp(0, last) as usize];
    (0..n as isize)
        .map(|t| {
            (1..=window as isize)
                .map(|w| w as f64 * (at(t + w) - at(t - w)))
                .sum::<f64>()
                / denom
        })
        .collect()
}

/// Mean, population std-dev, excess kurtosis, skewness, min, max, relative
/// positions of min and max, range, and the offset, slope and MSE of a
/// least-squares line over time normalized to `[0, 1]`.
///
/// Higher moments are 0 when the track has (numerically) zero variance.
pub fn functionals(track: &[f64]) -> Result<[f64; FUNCTIONAL_COUNT]> {
    let n = track.len();
    if n == 0 {
        return Err(Error::InvalidInput("functionals of an empty track".into()));
    }
    let nf = n as f64;
    let mean = track.iter().sum::<f64>() / nf;

    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in track {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let std = m2.sqrt();

    let (mut min, mut max) = (track[0], track[0]);
    let (mut argmin, mut argmax) = (0usize, 0usize);
    for (i, &x) in track.iter().enumerate().skip(1) {
        if x < min {
            min = x;
            argmin = i;
        }
        if x > max {
            max = x;
            argmax = i;
        }
    }

    let magnitude = min.abs().max(max.abs()).max(1.0);
    let (kurtosis, skewness) = if std > 1e-10 * magnitude {
        (m4 / (m2 * m2) - 3.0, m3 / (m2 * std))
    } else {
        (0.0, 0.0)
    };

    let span = (n - 1) as f64;
    let relpos = |i: usize| if n == 1 { 0.0 } else { i as f64 / span };

    let (offset, slope, mse) = if n == 1 {
        (track[0], 0.0, 0.0)
    } else {
        let t_mean = 0.5;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (i, &x) in track.iter().enumerate() {
            let dt = i as f64 / span - t_mean;
            sxy += dt * (x - mean);
            sxx += dt * dt;
        }
        let slope = sxy / sxx;
        let offset = mean - slope * t_mean;
        let mse = track
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let r = x - (offset + slope * i as f64 / span);
                r * r
            })
            .sum::<f64>()
            / nf;
        (offset, slope, mse)
    };

    Ok([
        mean,
        std,
        kurtosis,
        skewness,
        min,
        max,
        relpos(argmin),
        relpos(argmax),
        max - min,
        offset,
        slope,
        mse,
    ])
}
