//! Python bindings: audio loading, preprocessing, feature extraction,
//! training, metrics, fusion and whole-task evaluation.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyIOError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use vocalscreen::audio;
use vocalscreen::dataset::{self, Label, Manifest, SynthConfig, Task, TaskSpec};
use vocalscreen::eval::{self, ClassProbabilities, ConfusionCounts, EvalConfig, Method};
use vocalscreen::features::{self, FeatureVector, FrameConfig, SymptomVocabulary};
use vocalscreen::learn::{self, SmoteConfig, TrainConfig, TrainedModel};
use vocalscreen::pipeline::{self, ClipOutcome, ExtractionConfig};
use vocalscreen::preprocess::{self, PreprocessConfig};
use vocalscreen::store::FeatureStore;

create_exception!(vocalscreen, VocalscreenError, PyException);

fn to_py(e: vocalscreen::Error) -> PyErr {
    match e {
        vocalscreen::Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => VocalscreenError::new_err(other.to_string()),
    }
}

trait OrPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> OrPy<T> for vocalscreen::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn parse_label(s: &str) -> PyResult<Label> {
    Label::parse(s).ok_or_else(|| VocalscreenError::new_err(format!("label must be 'pos' or 'neg', got {s:?}")))
}

fn parse_labels(labels: &[String]) -> PyResult<Vec<Label>> {
    labels.iter().map(|l| parse_label(l)).collect()
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// Mono clip of samples in [-1, 1].
#[pyclass(name = "AudioClip", module = "vocalscreen", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyAudioClip {
    inner: audio::AudioClip,
}

#[pymethods]
impl PyAudioClip {
    #[new]
    fn new(samples: Vec<f64>, sample_rate: u32) -> Self {
        Self {
            inner: audio::AudioClip::new(samples, sample_rate),
        }
    }

    #[getter]
    fn samples(&self) -> Vec<f64> {
        self.inner.samples.clone()
    }

    #[getter]
    fn sample_rate(&self) -> u32 {
        self.inner.sample_rate
    }

    #[getter]
    fn duration_s(&self) -> f64 {
        self.inner.duration_s()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "AudioClip({} samples @ {} Hz)",
            self.inner.len(),
            self.inner.sample_rate
        )
    }
}

/// Decodes WAV bytes, downmixes to mono and resamples to 16 kHz.
#[pyfunction]
fn decode_wav(data: &[u8]) -> PyResult<PyAudioClip> {
    let wav = audio::decode_wav(data).py_err()?;
    Ok(PyAudioClip {
        inner: audio::standardize(&wav).py_err()?,
    })
}

#[pyfunction]
fn read_wav(path: PathBuf) -> PyResult<PyAudioClip> {
    Ok(PyAudioClip {
        inner: audio::load_standardized(path).py_err()?,
    })
}

#[pyfunction]
fn write_wav(path: PathBuf, clip: &PyAudioClip) -> PyResult<()> {
    audio::write_wav_file(path, &clip.inner).py_err()
}

#[pyfunction]
fn resample(clip: &PyAudioClip, target_rate: u32) -> PyResult<PyAudioClip> {
    Ok(PyAudioClip {
        inner: audio::resample(&clip.inner, target_rate).py_err()?,
    })
}

/// Trims, normalizes and gates a clip. Returns `(clip, verdict)`.
#[pyfunction]
fn preprocess_clip<'py>(py: Python<'py>, clip: &PyAudioClip) -> PyResult<(PyAudioClip, Bound<'py, PyDict>)> {
    let (cleaned, verdict) = preprocess::preprocess(&clip.inner, &PreprocessConfig::default(), &FrameConfig::default()).py_err()?;
    let d = PyDict::new(py);
    d.set_item("accepted", verdict.accepted)?;
    d.set_item("reason", verdict.reason.as_str())?;
    d.set_item("voiced_ratio", verdict.voiced_ratio)?;
    d.set_item("duration_s", verdict.duration_s)?;
    Ok((PyAudioClip { inner: cleaned }, d))
}

/// The 384 functionals of an already preprocessed 16 kHz clip.
#[pyfunction]
fn extract_features(clip: &PyAudioClip) -> PyResult<Vec<f64>> {
    Ok(features::extract_is09(&clip.inner, &FrameConfig::default())
        .py_err()?
        .into_inner())
}

/// Full per-recording pipeline; `None` when the speech gate rejects the clip.
#[pyfunction]
fn process_clip(clip: &PyAudioClip) -> PyResult<Option<Vec<f64>>> {
    Ok(match pipeline::extract_clip(&clip.inner, &ExtractionConfig::default()).py_err()? {
        ClipOutcome::Accepted { features, .. } => Some(features.into_inner()),
        ClipOutcome::Rejected { .. } => None,
    })
}

#[pyfunction]
fn feature_names() -> Vec<String> {
    features::feature_names()
}

#[pyfunction]
fn symptom_vocabulary() -> Vec<String> {
    SymptomVocabulary::default().names().to_vec()
}

#[pyfunction]
fn encode_symptoms(symptoms: Vec<String>) -> PyResult<Vec<f64>> {
    Ok(
        features::encode_symptoms(symptoms.iter().map(String::as_str), &SymptomVocabulary::default())
            .py_err()?
            .into_inner(),
    )
}

#[pyfunction]
fn fuse_features(voice: Vec<f64>, symptoms: Vec<String>) -> PyResult<Vec<f64>> {
    let v = FeatureVector::new(voice).py_err()?;
    let s = features::encode_symptoms(symptoms.iter().map(String::as_str), &SymptomVocabulary::default()).py_err()?;
    Ok(eval::fuse_features(&v, &s))
}

/// `voice` and `symptom` are `(p_neg, p_pos)` pairs; returns `'pos'` or `'neg'`.
#[pyfunction]
fn fuse_decisions(voice: (f64, f64), symptom: (f64, f64)) -> PyResult<&'static str> {
    let v = ClassProbabilities::new(voice.0, voice.1).py_err()?;
    let s = ClassProbabilities::new(symptom.0, symptom.1).py_err()?;
    Ok(eval::fuse_decisions(&v, &s).py_err()?.as_str())
}

#[pyfunction]
fn roc_auc(scores: Vec<f64>, labels: Vec<String>) -> PyResult<f64> {
    eval::roc_auc(&scores, &parse_labels(&labels)?).py_err()
}

#[pyfunction]
fn pr_auc(scores: Vec<f64>, labels: Vec<String>) -> PyResult<f64> {
    eval::pr_auc(&scores, &parse_labels(&labels)?).py_err()
}

/// List of `(fpr, tpr, threshold)` tuples.
#[pyfunction]
fn roc_curve(scores: Vec<f64>, labels: Vec<String>) -> PyResult<Vec<(f64, f64, f64)>> {
    Ok(eval::roc_curve(&scores, &parse_labels(&labels)?)
        .py_err()?
        .into_iter()
        .map(|p| (p.fpr, p.tpr, p.threshold))
        .collect())
}

#[pyfunction]
fn sensitivity_specificity(tp: usize, fn_: usize, tn: usize, fp: usize) -> PyResult<(f64, f64)> {
    eval::sensitivity_specificity(&ConfusionCounts { tp, fp, tn, fn_ }).py_err()
}

/// Returns `(features, labels)` with synthetic minority rows appended.
#[pyfunction]
#[pyo3(signature = (features, labels, k=5, seed=0))]
fn smote(features: Vec<Vec<f64>>, labels: Vec<String>, k: usize, seed: u64) -> PyResult<(Vec<Vec<f64>>, Vec<String>)> {
    let r = learn::smote(&features, &parse_labels(&labels)?, &SmoteConfig { k, seed }).py_err()?;
    Ok((r.features, r.labels.iter().map(|l| l.as_str().to_string()).collect()))
}

/// Standardizer + SMOTE + linear SVM + Platt sigmoid.
#[pyclass(name = "Model", module = "vocalscreen", frozen)]
pub struct PyModel {
    inner: TrainedModel,
}

#[pymethods]
impl PyModel {
    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights.clone()
    }

    #[getter]
    fn bias(&self) -> f64 {
        self.inner.bias
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.meta.converged
    }

    fn decision_value(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.decision_value(&x).py_err()
    }

    fn predict(&self, x: Vec<f64>) -> PyResult<&'static str> {
        Ok(self.inner.predict(&x).py_err()?.as_str())
    }

    fn probability(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.probability(&x).py_err()
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().py_err()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: TrainedModel::from_json(text).py_err()?,
        })
    }
}

#[pyfunction]
#[pyo3(signature = (features, labels, c=0.01, seed=0))]
fn train_model(features: Vec<Vec<f64>>, labels: Vec<String>, c: f64, seed: u64) -> PyResult<PyModel> {
    let mut cfg = TrainConfig {
        seed,
        ..TrainConfig::default()
    };
    cfg.svm.c = c;
    Ok(PyModel {
        inner: learn::train_model(&features, &parse_labels(&labels)?, &cfg).py_err()?,
    })
}

/// Writes a synthetic corpus and returns the manifest path.
#[pyfunction]
#[pyo3(signature = (out_dir, seed=7, positives=20, negatives=20, preset="default"))]
fn synth_corpus(out_dir: PathBuf, seed: u64, positives: usize, negatives: usize, preset: &str) -> PyResult<PathBuf> {
    let base = match preset {
        "default" => SynthConfig {
            seed,
            ..SynthConfig::default()
        },
        "separable" => SynthConfig::separable(seed),
        "null" => SynthConfig::null_signal(seed),
        other => return Err(VocalscreenError::new_err(format!("unknown preset {other:?}"))),
    };
    let cfg = SynthConfig {
        positive_participants: positives,
        negative_participants: negatives,
        ..base
    };
    Ok(dataset::synth_corpus(&cfg, out_dir).py_err()?.manifest_path)
}

/// Extracts every manifest row; writes the feature store CSV and returns
/// `(accepted, rejected)` counts.
#[pyfunction]
fn extract_manifest(manifest: PathBuf, features_csv: PathBuf) -> PyResult<(usize, usize)> {
    let m = Manifest::read(manifest).py_err()?;
    let report = pipeline::extract_manifest(&m, &ExtractionConfig::default()).py_err()?;
    report.store.save(features_csv).py_err()?;
    Ok((report.store.len(), report.rejections.len()))
}

/// Cross-validates one task/method and returns the summary as a dict.
#[pyfunction]
#[pyo3(signature = (manifest, features_csv, task="task1", method="v_only", seed=7, folds=5))]
fn run_task<'py>(
    py: Python<'py>,
    manifest: PathBuf,
    features_csv: PathBuf,
    task: &str,
    method: &str,
    seed: u64,
    folds: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let task: Task = task.parse().py_err()?;
    let method: Method = method.parse().py_err()?;
    let m = Manifest::read(manifest).py_err()?;
    let store = FeatureStore::load(features_csv).py_err()?;
    let cfg = EvalConfig {
        folds,
        train: TrainConfig {
            seed,
            ..TrainConfig::default()
        },
        seed,
    };
    let run = eval::run_task(&m.records, &store, &SymptomVocabulary::default(), TaskSpec::new(task), method, &cfg).py_err()?;
    json_to_py(py, &run.summary.to_json().py_err()?)
}

#[pyfunction]
fn format_cell(mean: f64, std: f64) -> String {
    eval::format_cell(&eval::MetricSummary {
        mean,
        std,
        min: mean,
        max: mean,
    })
}

#[pymodule]
#[pyo3(name = "vocalscreen")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("VocalscreenError", m.py().get_type::<VocalscreenError>())?;
    m.add("FEATURE_DIM", features::FEATURE_DIM)?;
    m.add_class::<PyAudioClip>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(decode_wav, m)?)?;
    m.add_function(wrap_pyfunction!(read_wav, m)?)?;
    m.add_function(wrap_pyfunction!(write_wav, m)?)?;
    m.add_function(wrap_pyfunction!(resample, m)?)?;
    m.add_function(wrap_pyfunction!(preprocess_clip, m)?)?;
    m.add_function(wrap_pyfunction!(extract_features, m)?)?;
    m.add_function(wrap_pyfunction!(process_clip, m)?)?;
    m.add_function(wrap_pyfunction!(feature_names, m)?)?;
    m.add_function(wrap_pyfunction!(symptom_vocabulary, m)?)?;
    m.add_function(wrap_pyfunction!(encode_symptoms, m)?)?;
    m.add_function(wrap_pyfunction!(fuse_features, m)?)?;
    m.add_function(wrap_pyfunction!(fuse_decisions, m)?)?;
    m.add_function(wrap_pyfunction!(roc_auc, m)?)?;
    m.add_function(wrap_pyfunction!(pr_auc, m)?)?;
    m.add_function(wrap_pyfunction!(roc_curve, m)?)?;
    m.add_function(wrap_pyfunction!(sensitivity_specificity, m)?)?;
    m.add_function(wrap_pyfunction!(smote, m)?)?;
    m.add_function(wrap_pyfunction!(train_model, m)?)?;
    m.add_function(wrap_pyfunction!(synth_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(extract_manifest, m)?)?;
    m.add_function(wrap_pyfunction!(run_task, m)?)?;
    m.add_function(wrap_pyfunction!(format_cell, m)?)?;
    Ok(())
}
