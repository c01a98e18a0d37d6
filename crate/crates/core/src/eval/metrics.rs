use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub se: f64,
    pub sp: f64,
    pub roc_auc: f64,
    pub pr_auc: f64,
}

impl FoldMetrics {
    pub const NAMES: [&'static str; 4] = ["SE", "SP", "ROC-AUC", "PR-AUC"];

    pub fn values(&self) -> [f64; 4] {
        [self.se, self.sp, self.roc_auc, self.pr_auc]
    }
}

/// One ROC operating point: predictions are positive when `score >= threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    pub threshold: f64,
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::InvalidInput(format!("length mismatch: {a} vs {b}")));
    }
    Ok(())
}

pub fn confusion(truth: &[Label], predicted: &[Label]) -> Result<ConfusionCounts> {
    check_lengths(truth.len(), predicted.len())?;
    let mut c = ConfusionCounts::default();
    for (t, p) in truth.iter().zip(predicted) {
        match (t, p) {
            (Label::Positive, Label::Positive) => c.tp += 1,
            (Label::Positive, Label::Negative) => c.fn_ += 1,
            (Label::Negative, Label::Negative) => c.tn += 1,
            (Label::Negative, Label::Positive) => c.fp += 1,
        }
    }
    Ok(c)
}

pub fn sensitivity_specificity(c: &ConfusionCounts) -> Result<(f64, f64)> {
    if c.tp + c.fn_ == 0 {
        return Err(Error::UndefinedMetric {
            metric: "SE",
            reason: "no positive samples (TP + FN = 0)".into(),
        });
    }
    if c.tn + c.fp == 0 {
        return Err(Error::UndefinedMetric {
            metric: "SP",
            reason: "no negative samples (TN + FP = 0)".into(),
        });
    }
    Ok((
        c.tp as f64 / (c.tp + c.fn_) as f64,
        c.tn as f64 / (c.tn + c.fp) as f64,
    ))
}

fn check_scores(metric: &'static str, scores: &[f64], labels: &[Label]) -> Result<(usize, usize)> {
    check_lengths(scores.len(), labels.len())?;
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidInput(format!("{metric}: NaN score")));
    }
    let pos = labels.iter().filter(|l| **l == Label::Positive).count();
    Ok((pos, labels.len() - pos))
}

/// Indices sorted by descending score, grouped into runs of equal score.
fn descending_groups(scores: &[f64]) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in idx {
        match groups.last_mut() {
            Some(g) if scores[g[0]] == scores[i] => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// Mann-Whitney AUC: the fraction of (positive, negative) pairs ranked
/// correctly, ties counting one half.
pub fn roc_auc(scores: &[f64], labels: &[Label]) -> Result<f64> {
    let (n_pos, n_neg) = check_scores("ROC-AUC", scores, labels)?;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedMetric {
            metric: "ROC-AUC",
            reason: "needs both classes".into(),
        });
    }
    // Twice the Mann-Whitney U, kept integral.
    let mut twice_u: u64 = 0;
    let mut neg_below = n_neg as u64;
    for group in descending_groups(scores) {
        let p = group.iter().filter(|&&i| labels[i] == Label::Positive).count() as u64;
        let n = group.len() as u64 - p;
        neg_below -= n;
        twice_u += 2 * p * neg_below + p * n;
    }
    Ok(twice_u as f64 / (2 * n_pos as u64 * n_neg as u64) as f64)
}

/// Average precision, `Σ (Rᵢ − Rᵢ₋₁) Pᵢ` over descending unique thresholds.
pub fn pr_auc(scores: &[f64], labels: &[Label]) -> Result<f64> {
    let (n_pos, _) = check_scores("PR-AUC", scores, labels)?;
    if n_pos == 0 {
        return Err(Error::UndefinedMetric {
            metric: "PR-AUC",
            reason: "no positive samples".into(),
        });
    }
    let (mut tp, mut seen) = (0usize, 0usize);
    let mut ap = 0.0;
    for group in descending_groups(scores) {
        let p = group.iter().filter(|&&i| labels[i] == Label::Positive).count();
        tp += p;
        seen += group.len();
        if p > 0 {
            ap += (p as f64 / n_pos as f64) * (tp as f64 / seen as f64);
        }
    }
    Ok(ap)
}

/// ROC points from `(0, 0)` at threshold `+inf` down to `(1, 1)`, one per
/// distinct score.
pub fn roc_curve(scores: &[f64], labels: &[Label]) -> Result<Vec<RocPoint>> {
    let (n_pos, n_neg) = check_scores("ROC curve", scores, labels)?;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedMetric {
            metric: "ROC curve",
            reason: "needs both classes".into(),
        });
    }
    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    for group in descending_groups(scores) {
        let p = group.iter().filter(|&&i| labels[i] == Label::Positive).count();
        tp += p;
        fp += group.len() - p;
        points.push(RocPoint {
            fpr: fp as f64 / n_neg as f64,
            tpr: tp as f64 / n_pos as f64,
            threshold: scores[group[0]],
        });
    }
    Ok(points)
}

/// Trapezoidal area under a piecewise-linear curve of (fpr, tpr) points.
pub fn trapezoid_area(points: &[RocPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum()
}

/// Vertical average of several ROC curves on `grid_points` evenly spaced
/// false-positive rates. Thresholds of the averaged curve are NaN.
pub fn mean_roc_curve(curves: &[Vec<RocPoint>], grid_points: usize) -> Vec<RocPoint> {
    if curves.is_empty() || grid_points < 2 {
        return Vec::new();
    }
    let mut out = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::NAN,
    }];
    for g in 0..grid_points {
        let x = g as f64 / (grid_points - 1) as f64;
        let tpr = curves.iter().map(|c| interpolate_tpr(c, x)).sum::<f64>() / curves.len() as f64;
        out.push(RocPoint {
            fpr: x,
            tpr,
            threshold: f64::NAN,
        });
    }
    out
}

fn interpolate_tpr(curve: &[RocPoint], x: f64) -> f64 {
    let last_le = curve.iter().rposition(|p| p.fpr <= x).unwrap_or(0);
    match curve.get(last_le + 1) {
        Some(next) if next.fpr > curve[last_le].fpr => {
            let a = curve[last_le];
            a.tpr + (next.tpr - a.tpr) * (x - a.fpr) / (next.fpr - a.fpr)
        }
        _ => curve[last_le].tpr,
    }
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}
