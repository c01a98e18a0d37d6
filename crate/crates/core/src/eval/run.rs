use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{grouped_stratified_kfold, FoldPlan};
use super::fusion::{fuse_decisions_detailed, fuse_features, ClassProbabilities};
use super::metrics::{confusion, mean_std, pr_auc, roc_auc, roc_curve, sensitivity_specificity, FoldMetrics, RocPoint};
use crate::dataset::{build_cohort, Label, LabeledSet, SampleRecord, TaskSpec};
use crate::error::{Error, Result};
use crate::features::{encode_symptoms, SymptomVocabulary};
use crate::learn::{train_model, TrainConfig, TrainedModel};
use crate::store::FeatureStore;

pub const SUMMARY_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    VOnly,
    SOnly,
    VsFf,
    VsDf,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::VOnly, Method::SOnly, Method::VsFf, Method::VsDf];

    pub fn id(self) -> &'static str {
        match self {
            Method::VOnly => "v_only",
            Method::SOnly => "s_only",
            Method::VsFf => "vs_ff",
            Method::VsDf => "vs_df",
        }
    }

    /// Row label used in comparison tables.
    pub fn title(self) -> &'static str {
        match self {
            Method::VOnly => "V_only",
            Method::SOnly => "S_only",
            Method::VsFf => "(V+S)_FF",
            Method::VsDf => "(V+S)_DF",
        }
    }

    pub fn uses_symptoms(self) -> bool {
        self != Method::VOnly
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub folds: usize,
    pub train: TrainConfig,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            folds: 5,
            train: TrainConfig::default(),
            seed: 0,
        }
    }
}

/// Which samples each fold's fitted state saw.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAudit {
    pub fold: usize,
    pub train_participants: BTreeSet<String>,
    pub test_participants: BTreeSet<String>,
    /// Samples the standardizer, SMOTE and SVM of this fold were fit on.
    pub fit_samples: BTreeSet<String>,
    pub test_samples: BTreeSet<String>,
}

impl FoldAudit {
    pub fn is_clean(&self) -> bool {
        self.train_participants.is_disjoint(&self.test_participants) && self.fit_samples.is_disjoint(&self.test_samples)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub sample_id: String,
    pub truth: Label,
    pub predicted: Label,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRun {
    pub fold: usize,
    pub metrics: FoldMetrics,
    pub roc: Vec<RocPoint>,
    pub predictions: Vec<Prediction>,
    /// (modality, model); two entries for decision fusion.
    pub models: Vec<(String, TrainedModel)>,
    pub audit: FoldAudit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl MetricSummary {
    pub fn of(values: &[f64]) -> Self {
        let (mean, std) = mean_std(values);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            mean: if values.is_empty() { mean } else { mean.clamp(min, max) },
            std,
            min,
            max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub format_version: u32,
    pub task: String,
    pub method: Method,
    pub seed: u64,
    pub n_pos: usize,
    pub n_neg: usize,
    pub folds: Vec<FoldMetrics>,
    pub se: MetricSummary,
    pub sp: MetricSummary,
    pub roc_auc: MetricSummary,
    pub pr_auc: MetricSummary,
}

impl EvalSummary {
    pub fn from_folds(task: &str, method: Method, seed: u64, n_pos: usize, n_neg: usize, folds: Vec<FoldMetrics>) -> Self {
        let col = |f: fn(&FoldMetrics) -> f64| MetricSummary::of(&folds.iter().map(f).collect::<Vec<_>>());
        Self {
            format_version: SUMMARY_FORMAT_VERSION,
            task: task.to_string(),
            method,
            seed,
            n_pos,
            n_neg,
            se: col(|m| m.se),
            sp: col(|m| m.sp),
            roc_auc: col(|m| m.roc_auc),
            pr_auc: col(|m| m.pr_auc),
            folds,
        }
    }

    pub fn metrics(&self) -> [MetricSummary; 4] {
        [self.se, self.sp, self.roc_auc, self.pr_auc]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRun {
    pub summary: EvalSummary,
    pub plan: FoldPlan,
    pub folds: Vec<FoldRun>,
}

struct Inputs {
    voice: Vec<Vec<f64>>,
    symptoms: Vec<Vec<f64>>,
    fused: Vec<Vec<f64>>,
}

/// Builds the labeled cohort for `method`: samples without stored features
/// are dropped, and symptom-based methods keep only symptomatic samples.
pub fn method_cohort(records: &[SampleRecord], store: &FeatureStore, spec: TaskSpec, method: Method) -> Result<LabeledSet> {
    let set = build_cohort(records, spec)?.retain("samples with features", |r| store.get(&r.record.sample_id).is_some())?;
    if method.uses_symptoms() {
        set.retain("symptomatic samples", |r| r.record.is_symptomatic())
    } else {
        Ok(set)
    }
}

fn fold_seed(seed: u64, fold: usize) -> u64 {
    seed ^ (fold as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn pick(rows: &[Vec<f64>], idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter().map(|&i| rows[i].clone()).collect()
}

/// Subject-independent cross-validation of one task/method.
pub fn run_task(
    records: &[SampleRecord],
    store: &FeatureStore,
    vocab: &SymptomVocabulary,
    spec: TaskSpec,
    method: Method,
    cfg: &EvalConfig,
) -> Result<TaskRun> {
    cfg.train.svm.validate()?;
    let set = method_cohort(records, store, spec, method)?;
    let labels = set.labels();

    let mut inputs = Inputs {
        voice: Vec::with_capacity(set.len()),
        symptoms: Vec::with_capacity(set.len()),
        fused: Vec::with_capacity(set.len()),
    };
    for r in &set.records {
        let v = &store.get(&r.record.sample_id).expect("filtered by method_cohort").features;
        let s = encode_symptoms(r.record.symptoms.iter().map(String::as_str), vocab)?;
        inputs.fused.push(fuse_features(v, &s));
        inputs.voice.push(v.as_slice().to_vec());
        inputs.symptoms.push(s.into_inner());
    }

    let plan = grouped_stratified_kfold(&set, cfg.folds, cfg.seed)?;
    let folds = (0..plan.k)
        .into_par_iter()
        .map(|f| run_fold(&set, &labels, &inputs, &plan, f, method, cfg))
        .collect::<Result<Vec<FoldRun>>>()?;

    for fold in &folds {
        if !fold.audit.is_clean() {
            return Err(Error::InvalidInput(format!("fold {} leaks test samples into training", fold.fold)));
        }
    }

    let summary = EvalSummary::from_folds(
        spec.task.id(),
        method,
        cfg.seed,
        set.count(Label::Positive),
        set.count(Label::Negative),
        folds.iter().map(|f| f.metrics).collect(),
    );
    Ok(TaskRun { summary, plan, folds })
}

fn run_fold(
    set: &LabeledSet,
    labels: &[Label],
    inputs: &Inputs,
    plan: &FoldPlan,
    fold: usize,
    method: Method,
    cfg: &EvalConfig,
) -> Result<FoldRun> {
    let train = plan.train_indices(fold);
    let test = &plan.test_indices[fold];
    let train_y: Vec<Label> = train.iter().map(|&i| labels[i]).collect();
    let truth: Vec<Label> = test.iter().map(|&i| labels[i]).collect();
    let seed = fold_seed(cfg.seed, fold);
    let fit = |rows: &[Vec<f64>], seed: u64| -> Result<TrainedModel> {
        let tc = TrainConfig { seed, ..cfg.train };
        let mut model = train_model(&pick(rows, &train), &train_y, &tc)?;
        model.meta.task = Some(set.spec.task.id().to_string());
        model.meta.method = Some(method.id().to_string());
        Ok(model)
    };

    let (models, predicted, scores) = match method {
        Method::VOnly | Method::SOnly | Method::VsFf => {
            let (name, rows) = match method {
                Method::VOnly => ("voice", &inputs.voice),
                Method::SOnly => ("symptom", &inputs.symptoms),
                _ => ("fused", &inputs.fused),
            };
            let model = fit(rows, seed)?;
            let scores = test
                .iter()
                .map(|&i| model.decision_value(&rows[i]))
                .collect::<Result<Vec<f64>>>()?;
            let predicted = scores.iter().map(|&s| Label::from_score(s)).collect();
            (vec![(name.to_string(), model)], predicted, scores)
        }
        Method::VsDf => {
            let voice = fit(&inputs.voice, seed)?;
            let symptom = fit(&inputs.symptoms, seed.wrapping_add(1))?;
            let mut predicted = Vec::with_capacity(test.len());
            let mut scores = Vec::with_capacity(test.len());
            for &i in test {
                let pv = ClassProbabilities::from_positive(voice.probability(&inputs.voice[i])?)?;
                let ps = ClassProbabilities::from_positive(symptom.probability(&inputs.symptoms[i])?)?;
                let (label, p_pos) = fuse_decisions_detailed(&pv, &ps)?;
                predicted.push(label);
                scores.push(p_pos);
            }
            (
                vec![("voice".to_string(), voice), ("symptom".to_string(), symptom)],
                predicted,
                scores,
            )
        }
    };

    let (se, sp) = sensitivity_specificity(&confusion(&truth, &predicted)?)?;
    let metrics = FoldMetrics {
        se,
        sp,
        roc_auc: roc_auc(&scores, &truth)?,
        pr_auc: pr_auc(&scores, &truth)?,
    };
    let roc = roc_curve(&scores, &truth)?;

    let ids = |idx: &[usize]| -> BTreeSet<String> { idx.iter().map(|&i| set.records[i].record.sample_id.clone()).collect() };
    let pids = |idx: &[usize]| -> BTreeSet<String> {
        idx.iter().map(|&i| set.records[i].record.participant_id.clone()).collect()
    };
    let audit = FoldAudit {
        fold,
        train_participants: pids(&train),
        test_participants: pids(test),
        fit_samples: ids(&train),
        test_samples: ids(test),
    };
    let predictions = test
        .iter()
        .enumerate()
        .map(|(n, &i)| Prediction {
            sample_id: set.records[i].record.sample_id.clone(),
            truth: truth[n],
            predicted: predicted[n],
            score: scores[n],
        })
        .collect();

    Ok(FoldRun {
        fold,
        metrics,
        roc,
        predictions,
        models,
        audit,
    })
}
