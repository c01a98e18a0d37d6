//! Voice-based screening pipeline.
//!
//! Recordings are decoded and standardized ([`audio`]), cleaned up
//! ([`preprocess`]), summarised as 384 paralinguistic features
//! ([`features`]), grouped into task cohorts ([`dataset`]), and classified
//! with a SMOTE-balanced linear SVM ([`learn`]) under subject-independent
//! cross-validation ([`eval`]).

pub mod audio;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod learn;
pub mod pipeline;
pub mod preprocess;
pub mod store;

pub use error::{Error, Result};
