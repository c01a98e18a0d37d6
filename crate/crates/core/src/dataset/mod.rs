//! Manifests, task cohorts, symptom prevalence and synthetic corpora.

pub mod cohort;
pub mod manifest;
pub mod prevalence;
pub mod synth;

pub use cohort::{build_cohort, Label, LabeledRecord, LabeledSet, Task, TaskSpec};
pub use manifest::{parse_manifest, write_manifest, Manifest, SampleRecord, TestStatus};
pub use prevalence::{symptom_prevalence, PrevalenceReport, PrevalenceRow};
pub use synth::{synth_corpus, synth_records, SymptomEmission, SynthConfig, SynthCorpus};
