use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vocalscreen::dataset::{SynthConfig, Task};
use vocalscreen::eval::Method;
use vocalscreen::features::FrameConfig;
use vocalscreen::learn::SvmConfig;
use vocalscreen::preprocess::PreprocessConfig;

use crate::error::CliError;

pub const CONFIG_FORMAT_VERSION: u32 = 1;

/// JSON run configuration. Command-line flags override these values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub format_version: u32,
    pub manifest: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub vocabulary: Option<PathBuf>,
    pub task: Task,
    pub method: Method,
    pub seed: u64,
    pub folds: usize,
    pub recency_days: u32,
    pub preprocess: PreprocessConfig,
    pub frame: FrameConfig,
    pub svm: SvmConfig,
    pub smote_k: usize,
    pub platt_folds: usize,
    pub synth: SynthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            format_version: CONFIG_FORMAT_VERSION,
            manifest: None,
            features: None,
            out: None,
            vocabulary: None,
            task: Task::Task1,
            method: Method::VOnly,
            seed: 7,
            folds: 5,
            recency_days: 14,
            preprocess: PreprocessConfig::default(),
            frame: FrameConfig::default(),
            svm: SvmConfig::default(),
            smote_k: 5,
            platt_folds: 3,
            synth: SynthConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: Self =
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        if cfg.format_version != CONFIG_FORMAT_VERSION {
            return Err(CliError::Usage(format!(
                "unsupported config format_version {}",
                cfg.format_version
            )));
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.folds < 2 {
            return Err(CliError::Usage(format!("--folds must be at least 2, got {}", self.folds)));
        }
        if self.recency_days == 0 {
            return Err(CliError::Usage("--recency-days must be positive".into()));
        }
        Ok(())
    }

    pub fn require<'a>(value: &'a Option<PathBuf>, flag: &str) -> Result<&'a PathBuf, CliError> {
        value
            .as_ref()
            .ok_or_else(|| CliError::Usage(format!("missing {flag} (give the flag or set it in --config)")))
    }
}
