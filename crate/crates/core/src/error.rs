use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed WAV data: {0}")]
    Format(String),

    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),

    #[error("clip too short: {samples} samples, at least {required} required")]
    TooShort { samples: usize, required: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown symptom {name:?}; expected one of {vocabulary:?}")]
    Vocabulary { name: String, vocabulary: Vec<String> },

    #[error("manifest row {row}: {message}")]
    Manifest { row: usize, message: String },

    #[error("feature store row {row}: {message}")]
    FeatureStore { row: usize, message: String },

    #[error("empty cohort for {task}: no {class} samples after filtering")]
    EmptyCohort { task: String, class: String },

    #[error("cannot build {folds} folds from {participants} participants")]
    Folds { folds: usize, participants: usize },

    #[error("undefined metric {metric}: {reason}")]
    UndefinedMetric { metric: &'static str, reason: String },

    #[error("invalid probability distribution: {0}")]
    Distribution(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
