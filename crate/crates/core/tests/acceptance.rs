//! Acceptance criteria 1-10. Runs without the libtest harness so each
//! criterion prints exactly one PASS/FAIL line.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use vocalscreen::dataset::{
    build_cohort, synth_corpus, synth_records, Label, Manifest, SampleRecord, SynthConfig, Task, TaskSpec, TestStatus,
};
use vocalscreen::eval::{
    format_cell, fuse_decisions, grouped_stratified_kfold, parse_roc_csv, pr_auc, roc_auc, roc_csv,
    sensitivity_specificity, trapezoid_area, ClassProbabilities, ConfusionCounts, EvalConfig, Method, MetricSummary,
    TaskRun,
};
use vocalscreen::features::{
    extract_is09, functionals, lld_f0, lld_mfcc, lld_rms, lld_zcr, FrameConfig, SymptomVocabulary, FEATURE_DIM,
};
use vocalscreen::learn::{primal_objective, smote, train_linear_svm, SmoteConfig, SvmConfig};
use vocalscreen::pipeline::{extract_manifest, ExtractionConfig};
use vocalscreen::store::FeatureStore;

const RATE: u32 = 16_000;
const FRAME: usize = 400;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn random_labels(rng: &mut ChaCha8Rng, n: usize) -> Vec<Label> {
    loop {
        let labels: Vec<Label> = (0..n)
            .map(|_| if rng.random_bool(0.5) { Label::Positive } else { Label::Negative })
            .collect();
        if labels.contains(&Label::Positive) && labels.contains(&Label::Negative) {
            return labels;
        }
    }
}

// 1 --------------------------------------------------------------------------

fn feature_contract() -> String {
    let cfg = SynthConfig {
        positive_participants: 13,
        negative_participants: 12,
        samples_per_participant: 2,
        min_duration_s: 0.5,
        max_duration_s: 5.0,
        ..SynthConfig::default()
    };
    let clips: Vec<_> = synth_records(&cfg).unwrap().into_iter().map(|(_, c)| c).collect();
    assert_eq!(clips.len(), 50);
    let start = Instant::now();
    let run = || -> Vec<Vec<f64>> {
        clips
            .iter()
            .map(|c| extract_is09(c, &FrameConfig::default()).unwrap().into_inner())
            .collect()
    };
    let first = run();
    let second = run();
    let elapsed = start.elapsed().as_secs_f64();
    for v in &first {
        assert_eq!(v.len(), FEATURE_DIM);
        assert_eq!(v.len(), 384);
        assert!(v.iter().all(|x| x.is_finite()));
    }
    for (a, b) in first.iter().zip(&second) {
        let a: Vec<u64> = a.iter().map(|x| x.to_bits()).collect();
        let b: Vec<u64> = b.iter().map(|x| x.to_bits()).collect();
        assert_eq!(a, b, "extraction is not bit-identical across runs");
    }
    assert!(elapsed < 30.0, "took {elapsed:.1}s");
    format!("50 clips x 384 finite, bit-identical, {elapsed:.2}s for two passes")
}

// 2 --------------------------------------------------------------------------

fn sine(freq: f64, amp: f64, phase: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| amp * (2.0 * PI * freq * i as f64 / RATE as f64 + phase).sin())
        .collect()
}

/// Sign changes of `sin(2π f t + φ)` strictly inside the sampled span.
fn sine_crossings(freq: f64, phase: f64, n: usize) -> usize {
    let end = (n - 1) as f64 / RATE as f64;
    let mut count = 0;
    let mut m = 0i64;
    loop {
        let t = (m as f64 * PI - phase) / (2.0 * PI * freq);
        if t > end {
            break;
        }
        if t > 0.0 {
            count += 1;
        }
        m += 1;
    }
    count
}

fn dsp_oracles() -> String {
    let cfg = FrameConfig::default();
    let mut worst_f0 = 0.0f64;
    for f in [100.0, 150.0, 200.0, 300.0, 400.0] {
        let p = lld_f0(&sine(f, 0.5, 0.0, FRAME), RATE, &cfg);
        assert!(p.voiced, "{f} Hz tone unvoiced");
        let err = (p.f0 - f).abs() / f;
        assert!(err <= 0.05, "{f} Hz estimated as {}", p.f0);
        worst_f0 = worst_f0.max(err);
    }

    for (f, phase) in [(100.0, 0.3), (440.0, 1.1), (1000.0, 0.7), (2500.0, 0.2)] {
        let x = sine(f, 0.8, phase, FRAME);
        let expected = sine_crossings(f, phase, FRAME) as f64 / (FRAME - 1) as f64;
        assert!((lld_zcr(&x) - expected).abs() <= 1e-3, "ZCR at {f} Hz");
    }
    let alternating: Vec<f64> = (0..FRAME).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    assert!((lld_zcr(&alternating) - 1.0).abs() <= 1e-3);
    assert_eq!(lld_zcr(&[0.25; FRAME]), 0.0);

    for (f, amp) in [(200.0, 0.5), (400.0, 0.9), (80.0, 0.3)] {
        assert!((lld_rms(&sine(f, amp, 0.0, FRAME)) - amp / 2f64.sqrt()).abs() <= 1e-3);
    }
    assert!((lld_rms(&[-0.3; FRAME]) - 0.3).abs() <= 1e-3);

    let zero = lld_mfcc(&[0.0; FRAME], RATE, &cfg).unwrap();
    assert_eq!(zero.len(), 12);
    assert!(zero.iter().all(|&c| c == 0.0), "silent frame MFCC {zero:?}");

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_gain = 0.0f64;
    for _ in 0..20 {
        let frame: Vec<f64> = (0..FRAME).map(|_| rng.random_range(-0.5..0.5)).collect();
        let base = lld_mfcc(&frame, RATE, &cfg).unwrap();
        for g in [0.05, 0.5, 3.0] {
            let scaled: Vec<f64> = frame.iter().map(|x| g * x).collect();
            let m = lld_mfcc(&scaled, RATE, &cfg).unwrap();
            for (a, b) in base.iter().zip(&m) {
                worst_gain = worst_gain.max((a - b).abs());
            }
        }
    }
    assert!(worst_gain <= 1e-6, "MFCC gain deviation {worst_gain:e}");
    format!("worst F0 error {:.2}%, MFCC gain deviation {worst_gain:.1e}", 100.0 * worst_f0)
}

// 3 --------------------------------------------------------------------------

fn reference_functionals(x: &[f64]) -> [f64; 12] {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let moment = |p: i32| x.iter().map(|v| (v - mean).powi(p)).sum::<f64>() / n;
    let var = moment(2);
    let std = var.sqrt();
    let kurt = moment(4) / (var * var) - 3.0;
    let skew = moment(3) / var.powf(1.5);
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let argmin = x.iter().position(|&v| v == min).unwrap();
    let argmax = x.iter().position(|&v| v == max).unwrap();
    let span = n - 1.0;
    let t: Vec<f64> = (0..x.len()).map(|i| i as f64 / span).collect();
    let st: f64 = t.iter().sum();
    let stt: f64 = t.iter().map(|v| v * v).sum();
    let sx: f64 = x.iter().sum();
    let stx: f64 = t.iter().zip(x).map(|(a, b)| a * b).sum();
    let slope = (n * stx - st * sx) / (n * stt - st * st);
    let offset = (sx - slope * st) / n;
    let mse = t
        .iter()
        .zip(x)
        .map(|(ti, xi)| (xi - offset - slope * ti).powi(2))
        .sum::<f64>()
        / n;
    [
        mean,
        std,
        kurt,
        skew,
        min,
        max,
        argmin as f64 / span,
        argmax as f64 / span,
        max - min,
        offset,
        slope,
        mse,
    ]
}

fn functional_oracles() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(3..300);
        let scale = 10f64.powf(rng.random_range(-2.0..2.0));
        let offset = rng.random_range(-50.0..50.0);
        let normal = Normal::new(offset, scale).unwrap();
        let x: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        let got = functionals(&x).unwrap();
        let want = reference_functionals(&x);
        for (i, (g, w)) in got.iter().zip(&want).enumerate() {
            assert!(close(*g, *w, 1e-9), "functional {i}: {g} vs {w}");
            worst = worst.max((g - w).abs() / w.abs().max(1.0));
        }

        let rev: Vec<f64> = x.iter().rev().copied().collect();
        let r = functionals(&rev).unwrap();
        for i in [0, 1, 2, 3, 4, 5, 8, 11] {
            assert!(close(r[i], got[i], 1e-9), "functional {i} not reversal invariant");
        }
        assert!(close(r[6], 1.0 - got[6], 1e-9));
        assert!(close(r[7], 1.0 - got[7], 1e-9));
        assert!(close(r[10], -got[10], 1e-9));
        assert!(close(r[9], got[9] + got[10], 1e-9));
    }
    format!("100 tracks, worst relative deviation {worst:.1e}")
}

// 4 --------------------------------------------------------------------------

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (b[i] - (i + 1..n).map(|k| a[i][k] * x[k]).sum::<f64>()) / a[i][i];
    }
    Some(x)
}

/// Exact dual optimum by enumerating every assignment of each αᵢ to the
/// lower bound, the upper bound or the free set, solving the equality
/// constrained stationarity system on the free set and keeping the best
/// feasible point.
fn dual_oracle(x: &[Vec<f64>], y: &[f64], c: f64) -> f64 {
    let n = x.len();
    let q: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| y[i] * y[j] * dot(&x[i], &x[j])).collect())
        .collect();
    let dual = |a: &[f64]| {
        let quad: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a[i] * a[j] * q[i][j]).sum();
        a.iter().sum::<f64>() - 0.5 * quad
    };
    let mut best = f64::NEG_INFINITY;
    for code in 0..3usize.pow(n as u32) {
        let state: Vec<usize> = (0..n).map(|i| code / 3usize.pow(i as u32) % 3).collect();
        let mut alpha: Vec<f64> = state.iter().map(|&s| if s == 1 { c } else { 0.0 }).collect();
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        if !free.is_empty() {
            let m = free.len();
            let mut a = vec![vec![0.0; m + 1]; m + 1];
            let mut b = vec![0.0; m + 1];
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[r][s] = q[i][j];
                }
                a[r][m] = y[i];
                a[m][r] = y[i];
                b[r] = 1.0 - (0..n).filter(|&j| state[j] != 2).map(|j| q[i][j] * alpha[j]).sum::<f64>();
            }
            b[m] = -(0..n).filter(|&j| state[j] != 2).map(|j| y[j] * alpha[j]).sum::<f64>();
            let Some(sol) = solve(a, b) else { continue };
            for (r, &i) in free.iter().enumerate() {
                alpha[i] = sol[r];
            }
        }
        let balance: f64 = alpha.iter().zip(y).map(|(a, y)| a * y).sum();
        if balance.abs() > 1e-9 || alpha.iter().any(|&a| a < -1e-12 || a > c + 1e-12) {
            continue;
        }
        best = best.max(dual(&alpha));
    }
    best
}

fn svm_oracle() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for case in 0..200 {
        let n = rng.random_range(2..=5);
        let d = rng.random_range(1..=3);
        let c = [0.01, 0.1, 1.0, 10.0][case % 4];
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let labels = random_labels(&mut rng, n);
        let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
        let cfg = SvmConfig {
            c,
            tolerance: 1e-10,
            max_iterations: 100_000,
            seed: case as u64,
        };
        let sol = train_linear_svm(&x, &labels, &cfg).unwrap();
        assert!(sol.alphas.iter().all(|&a| (0.0..=c).contains(&a)), "alpha outside [0, C]");
        let primal = primal_objective(&sol.weights, sol.bias, &x, &labels, c);
        let oracle = dual_oracle(&x, &y, c);
        assert!(oracle.is_finite(), "case {case}: oracle found no feasible point");
        let gap = primal - oracle;
        assert!(gap >= -1e-9 && gap <= 1e-6, "case {case}: primal {primal} vs oracle {oracle}");
        worst = worst.max(gap.abs());
    }

    for case in 0..20 {
        let n = rng.random_range(4..30);
        let labels = random_labels(&mut rng, n);
        let x: Vec<Vec<f64>> = labels
            .iter()
            .map(|l| {
                let mut p: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
                p[0] += 1.5 * l.sign();
                p
            })
            .collect();
        let cfg = SvmConfig {
            c: 1e3,
            seed: case,
            ..SvmConfig::default()
        };
        let sol = train_linear_svm(&x, &labels, &cfg).unwrap();
        for (xi, l) in x.iter().zip(&labels) {
            assert!(sol.decision(xi) * l.sign() > 0.0, "training error on separable data");
        }
    }
    format!("200 datasets, worst primal-dual gap {worst:.1e}; 20 separable sets at C=1e3 fit exactly")
}

// 5 --------------------------------------------------------------------------

fn pair_count_auc(scores: &[f64], labels: &[Label]) -> f64 {
    let (mut twice, mut pairs) = (0u64, 0u64);
    for (s, l) in scores.iter().zip(labels) {
        if *l != Label::Positive {
            continue;
        }
        for (t, m) in scores.iter().zip(labels) {
            if *m != Label::Negative {
                continue;
            }
            pairs += 1;
            twice += if s > t { 2 } else if s == t { 1 } else { 0 };
        }
    }
    twice as f64 / (2 * pairs) as f64
}

fn enumerated_ap(scores: &[f64], labels: &[Label]) -> f64 {
    let total_pos = labels.iter().filter(|&&l| l == Label::Positive).count() as f64;
    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for t in thresholds {
        let tp = scores.iter().zip(labels).filter(|(s, l)| **s >= t && **l == Label::Positive).count() as f64;
        let fp = scores.iter().zip(labels).filter(|(s, l)| **s >= t && **l == Label::Negative).count() as f64;
        let recall = tp / total_pos;
        ap += (recall - prev_recall) * tp / (tp + fp);
        prev_recall = recall;
    }
    ap
}

fn metric_oracles() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_ap = 0.0f64;
    for _ in 0..1000 {
        let n = rng.random_range(2..=20);
        let labels = random_labels(&mut rng, n);
        let scores: Vec<f64> = (0..n).map(|_| rng.random_range(0..6) as f64 / 5.0).collect();
        assert_eq!(roc_auc(&scores, &labels).unwrap(), pair_count_auc(&scores, &labels));
        let ap = pr_auc(&scores, &labels).unwrap();
        let want = enumerated_ap(&scores, &labels);
        assert!((ap - want).abs() <= 1e-12, "AP {ap} vs {want}");
        worst_ap = worst_ap.max((ap - want).abs());
    }

    let tables = [
        (ConfusionCounts { tp: 8, fn_: 2, tn: 6, fp: 4 }, 0.8, 0.6),
        (ConfusionCounts { tp: 17, fn_: 8, tn: 41, fp: 9 }, 17.0 / 25.0, 41.0 / 50.0),
        (ConfusionCounts { tp: 1, fn_: 0, tn: 0, fp: 3 }, 1.0, 0.0),
        (ConfusionCounts { tp: 0, fn_: 5, tn: 7, fp: 0 }, 0.0, 1.0),
    ];
    for (c, se, sp) in tables {
        assert_eq!(sensitivity_specificity(&c).unwrap(), (se, sp));
    }
    assert!(sensitivity_specificity(&ConfusionCounts { tp: 0, fn_: 0, tn: 3, fp: 1 }).is_err());
    format!("1000 tied instances exact; worst AP deviation {worst_ap:.1e}; 4 hand tables")
}

// 6 --------------------------------------------------------------------------

fn random_records(rng: &mut ChaCha8Rng) -> Vec<SampleRecord> {
    let participants = rng.random_range(10..40);
    let mut out = Vec::new();
    for p in 0..participants {
        let positive = rng.random_bool(0.4);
        let transitioned = positive && rng.random_bool(0.3);
        let samples = rng.random_range(1..=4).max(if transitioned { 2 } else { 1 });
        for k in 0..samples {
            let status = if positive && !(transitioned && k + 1 == samples) {
                TestStatus::Positive
            } else {
                TestStatus::Negative
            };
            out.push(SampleRecord {
                sample_id: format!("s{}", out.len()),
                participant_id: format!("p{p}"),
                audio_path: PathBuf::from("unused.wav"),
                test_status: status,
                days_since_test: Some(k as u32),
                symptoms: BTreeSet::new(),
                hospitalized: false,
            });
        }
    }
    out
}

fn cv_integrity() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut transitioned_seen = 0;
    for seed in 0..100u64 {
        let records = random_records(&mut rng);
        let set = build_cohort(&records, TaskSpec::new(Task::Task1)).unwrap();
        let k = rng.random_range(2..=5);
        let plan = grouped_stratified_kfold(&set, k, seed).unwrap();

        let mut seen = vec![0usize; set.len()];
        let mut fold_of: BTreeMap<&str, usize> = BTreeMap::new();
        for fold in 0..k {
            let test: HashSet<&str> = plan.test_indices[fold]
                .iter()
                .map(|&i| set.records[i].record.participant_id.as_str())
                .collect();
            let train: HashSet<&str> = plan
                .train_indices(fold)
                .iter()
                .map(|&i| set.records[i].record.participant_id.as_str())
                .collect();
            assert!(test.is_disjoint(&train), "seed {seed} fold {fold}: participant overlap");
            for &i in &plan.test_indices[fold] {
                seen[i] += 1;
                let pid = set.records[i].record.participant_id.as_str();
                assert_eq!(*fold_of.entry(pid).or_insert(fold), fold, "participant {pid} split");
            }
        }
        assert!(seen.iter().all(|&c| c == 1), "every sample must be tested exactly once");

        let mut labels_by_pid: BTreeMap<&str, BTreeSet<Label>> = BTreeMap::new();
        for r in &set.records {
            labels_by_pid.entry(r.record.participant_id.as_str()).or_default().insert(r.label);
        }
        transitioned_seen += labels_by_pid.values().filter(|s| s.len() == 2).count();
    }
    assert!(transitioned_seen > 0);
    format!("100 plans disjoint and complete; {transitioned_seen} transitioned participants kept atomic")
}

// 7 --------------------------------------------------------------------------

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn smote_contract() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for case in 0..50u64 {
        let minority = rng.random_range(2..12);
        let majority = minority + rng.random_range(1..25);
        let d = rng.random_range(1..6);
        let k = rng.random_range(1..=6);
        let minority_label = if case % 2 == 0 { Label::Positive } else { Label::Negative };
        let mut labels = vec![minority_label; minority];
        let majority_label = if minority_label == Label::Positive { Label::Negative } else { Label::Positive };
        labels.extend(vec![majority_label; majority]);
        let x: Vec<Vec<f64>> = (0..labels.len())
            .map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect())
            .collect();
        let out = smote(&x, &labels, &SmoteConfig { k, seed: case }).unwrap();
        let pos = out.labels.iter().filter(|&&l| l == Label::Positive).count();
        assert_eq!(pos * 2, out.labels.len(), "not balanced");
        assert_eq!(&out.features[..x.len()], &x[..]);

        let base: Vec<&Vec<f64>> = x.iter().zip(&labels).filter(|(_, l)| **l == minority_label).map(|(p, _)| p).collect();
        let k_eff = k.min(minority - 1);
        let neighbours: Vec<Vec<usize>> = (0..base.len())
            .map(|i| {
                let mut o: Vec<(f64, usize)> = (0..base.len()).filter(|&j| j != i).map(|j| (sq_dist(base[i], base[j]), j)).collect();
                o.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                o.into_iter().take(k_eff).map(|(_, j)| j).collect()
            })
            .collect();
        for (s, l) in out.features[x.len()..].iter().zip(&out.labels[x.len()..]) {
            assert_eq!(*l, minority_label);
            let explained = (0..base.len()).any(|i| {
                neighbours[i].iter().any(|&j| {
                    let dir: Vec<f64> = base[j].iter().zip(base[i]).map(|(a, b)| a - b).collect();
                    let off: Vec<f64> = s.iter().zip(base[i]).map(|(a, b)| a - b).collect();
                    let u = dot(&off, &dir) / dot(&dir, &dir);
                    let resid: f64 = off.iter().zip(&dir).map(|(o, v)| (o - u * v).powi(2)).sum::<f64>().sqrt();
                    (-1e-12..=1.0 + 1e-12).contains(&u) && resid <= 1e-9
                })
            });
            assert!(explained, "synthetic point {s:?} is not on a minority neighbour segment");
            checked += 1;
        }
    }
    format!("50 datasets balanced; {checked} synthetic points on neighbour segments")
}

// 8-10 shared corpus ---------------------------------------------------------

struct Corpus {
    _dir: tempfile::TempDir,
    manifest: Manifest,
    store: FeatureStore,
}

fn corpus(cfg: &SynthConfig) -> Corpus {
    let dir = tempfile::tempdir().unwrap();
    let synth = synth_corpus(cfg, dir.path()).unwrap();
    let manifest = Manifest::read(&synth.manifest_path).unwrap();
    let store = extract_manifest(&manifest, &ExtractionConfig::default()).unwrap().store;
    Corpus {
        _dir: dir,
        manifest,
        store,
    }
}

fn evaluate(c: &Corpus, task: Task, method: Method, seed: u64) -> TaskRun {
    let cfg = EvalConfig {
        seed,
        ..EvalConfig::default()
    };
    vocalscreen::eval::run_task(
        &c.manifest.records,
        &c.store,
        &SymptomVocabulary::default(),
        TaskSpec::new(task),
        method,
        &cfg,
    )
    .unwrap()
}

fn signal_detection(separable: &Corpus) -> String {
    let start = Instant::now();
    let sep = evaluate(separable, Task::Task1, Method::VOnly, 7).summary.roc_auc.mean;
    assert!(sep >= 0.90, "separable ROC-AUC {sep:.3}");
    let mut null = Vec::new();
    for seed in 100..105 {
        let c = corpus(&SynthConfig::null_signal(seed));
        null.push(evaluate(&c, Task::Task1, Method::VOnly, seed).summary.roc_auc.mean);
    }
    let avg = null.iter().sum::<f64>() / null.len() as f64;
    assert!((0.35..=0.65).contains(&avg), "null ROC-AUC average {avg:.3} ({null:?})");
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 300.0);
    let per_seed: Vec<String> = null.iter().map(|v| format!("{v:.2}")).collect();
    format!(
        "separable {sep:.3}; null mean {avg:.3} over seeds [{}]; {elapsed:.1}s",
        per_seed.join(", ")
    )
}

fn top(p: (f64, f64)) -> (Label, f64) {
    if p.1 >= p.0 {
        (Label::Positive, p.1)
    } else {
        (Label::Negative, p.0)
    }
}

fn fusion_behavior(separable: &Corpus) -> String {
    let run = evaluate(separable, Task::Task1, Method::VsDf, 7);
    let metrics = run.summary.metrics();
    assert_eq!(metrics.len(), 4);
    assert!(metrics.iter().all(|m| m.mean.is_finite() && m.std.is_finite()));

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let draw = |rng: &mut ChaCha8Rng| {
        let p = if rng.random_bool(0.5) {
            rng.random_range(0..=10) as f64 / 10.0
        } else {
            rng.random_range(0.0..=1.0)
        };
        (1.0 - p, p)
    };
    let mut symptom_wins = 0;
    for _ in 0..1000 {
        let v = draw(&mut rng);
        let s = draw(&mut rng);
        let (vl, vp) = top(v);
        let (sl, sp) = top(s);
        let expected = if sp > vp { sl } else { vl };
        symptom_wins += usize::from(sp > vp);
        let got = fuse_decisions(
            &ClassProbabilities::new(v.0, v.1).unwrap(),
            &ClassProbabilities::new(s.0, s.1).unwrap(),
        )
        .unwrap();
        assert_eq!(got, expected, "voice {v:?} symptom {s:?}");
    }
    let cells: Vec<String> = metrics.iter().map(format_cell).collect();
    format!("(V+S)_DF summary [{}]; 1000 pairs match ({symptom_wins} symptom wins)", cells.join(" "))
}

fn report_fidelity(separable: &Corpus) -> String {
    assert_eq!(
        format_cell(&MetricSummary {
            mean: 0.62,
            std: 0.15,
            min: 0.4,
            max: 0.8
        }),
        "0.62±0.15"
    );
    let run = evaluate(separable, Task::Task1, Method::VOnly, 7);
    let table = vocalscreen::eval::render_summary_table(std::slice::from_ref(&run.summary));
    for m in run.summary.metrics() {
        let cell = format_cell(&m);
        let (mean, std) = cell.split_once('±').unwrap();
        assert!(mean.len() == 4 && std.len() == 4, "cell {cell}");
        assert!(table.contains(&cell));
    }
    let mut worst = 0.0f64;
    for fold in &run.folds {
        let parsed = parse_roc_csv(&roc_csv(&fold.roc).unwrap()).unwrap();
        let area = trapezoid_area(&parsed);
        let diff = (area - fold.metrics.roc_auc).abs();
        assert!(diff <= 1e-12, "fold {} area {area} vs {}", fold.fold, fold.metrics.roc_auc);
        worst = worst.max(diff);
    }
    let folds: Vec<f64> = run.folds.iter().map(|f| f.metrics.roc_auc).collect();
    let mean = folds.iter().sum::<f64>() / folds.len() as f64;
    assert!((mean - run.summary.roc_auc.mean).abs() <= 1e-12);
    format!("cells 2-decimal; {} fold CSVs integrate to reported AUC (worst {worst:.1e})", run.folds.len())
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let separable = corpus(&SynthConfig::separable(7));
    let criteria: Vec<(&str, Box<dyn Fn() -> String + '_>)> = vec![
        ("feature contract", Box::new(feature_contract)),
        ("DSP oracles", Box::new(dsp_oracles)),
        ("functional oracles", Box::new(functional_oracles)),
        ("SVM oracle", Box::new(svm_oracle)),
        ("metric oracles", Box::new(metric_oracles)),
        ("CV integrity", Box::new(cv_integrity)),
        ("SMOTE contract", Box::new(smote_contract)),
        ("signal detection", Box::new(|| signal_detection(&separable))),
        ("fusion behavior", Box::new(|| fusion_behavior(&separable))),
        ("report fidelity", Box::new(|| report_fidelity(&separable))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match panic::catch_unwind(AssertUnwindSafe(check)) {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {:>2} FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
