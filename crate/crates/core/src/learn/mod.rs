//! Standardization, SMOTE, linear SVM training and Platt calibration.

pub mod model;
pub mod platt;
pub mod smote;
pub mod standardize;
pub mod svm;

pub use model::{train_model, ModelMeta, TrainConfig, TrainedModel, MODEL_FORMAT_VERSION};
pub use platt::{fit_platt, PlattParams};
pub use smote::{smote, Resampled, SmoteConfig};
pub use standardize::Standardizer;
pub use svm::{primal_objective, train_linear_svm, SvmConfig, SvmSolution};
