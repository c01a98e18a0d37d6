use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SYMPTOM_DIM: usize = 11;

/// Built-in symptom list used when no vocabulary file is given.
pub const DEFAULT_SYMPTOMS: [&str; SYMPTOM_DIM] = [
    "fever",
    "chills",
    "dry cough",
    "wet cough",
    "sore throat",
    "runny or blocked nose",
    "headache",
    "muscle ache",
    "shortness of breath",
    "tightness in chest",
    "loss of taste or smell",
];

/// Ordered list of the 11 symptom names that define the one-hot layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct SymptomVocabulary(Vec<String>);

impl SymptomVocabulary {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.len() != SYMPTOM_DIM {
            return Err(Error::Config(format!(
                "symptom vocabulary needs {SYMPTOM_DIM} names, got {}",
                names.len()
            )));
        }
        let unique: BTreeSet<&str> = names.iter().map(String::as_str).collect();
        if unique.len() != names.len() {
            return Err(Error::Config("symptom vocabulary has duplicate names".into()));
        }
        if names.iter().any(|n| n.trim().is_empty()) {
            return Err(Error::Config("symptom vocabulary has an empty name".into()));
        }
        Ok(Self(names))
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let names: Vec<String> = serde_json::from_str(&fs::read_to_string(path)?)?;
        Self::new(names)
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }
}

impl Default for SymptomVocabulary {
    fn default() -> Self {
        Self(DEFAULT_SYMPTOMS.iter().map(|s| s.to_string()).collect())
    }
}

impl TryFrom<Vec<String>> for SymptomVocabulary {
    type Error = Error;

    fn try_from(names: Vec<String>) -> Result<Self> {
        Self::new(names)
    }
}

impl From<SymptomVocabulary> for Vec<String> {
    fn from(v: SymptomVocabulary) -> Self {
        v.0
    }
}

/// Binary presence indicators, one per vocabulary entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymptomVector(Vec<f64>);

impl SymptomVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

pub fn encode_symptoms<'a, I>(symptoms: I, vocab: &SymptomVocabulary) -> Result<SymptomVector>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut values = vec![0.0; SYMPTOM_DIM];
    for name in symptoms {
        let idx = vocab.index_of(name).ok_or_else(|| Error::Vocabulary {
            name: name.to_string(),
            vocabulary: vocab.names().to_vec(),
        })?;
        values[idx] = 1.0;
    }
    Ok(SymptomVector(values))
}
