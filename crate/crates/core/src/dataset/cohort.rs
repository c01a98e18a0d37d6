use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::manifest::{SampleRecord, TestStatus};
use crate::error::{Error, Result};

/// Binary class of one sample within a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    /// `+1` for positive, `-1` for negative.
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn from_score(score: f64) -> Self {
        if score >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => "pos",
            Label::Negative => "neg",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "pos" | "positive" => Some(Label::Positive),
            "neg" | "negative" => Some(Label::Negative),
            _ => None,
        }
    }
}

impl From<TestStatus> for Label {
    fn from(s: TestStatus) -> Self {
        match s {
            TestStatus::Positive => Label::Positive,
            TestStatus::Negative => Label::Negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Task1,
    Task2,
    Task3,
    Task4,
}

impl Task {
    pub const ALL: [Task; 4] = [Task::Task1, Task::Task2, Task::Task3, Task::Task4];

    pub fn id(self) -> &'static str {
        match self {
            Task::Task1 => "task1",
            Task::Task2 => "task2",
            Task::Task3 => "task3",
            Task::Task4 => "task4",
        }
    }

    /// Row label used in result tables.
    pub fn title(self) -> &'static str {
        match self {
            Task::Task1 => "1. Pos. v.s. Neg.",
            Task::Task2 => "2. newPos. v.s. Neg. w/o sym.",
            Task::Task3 => "3. Pos. w/o sym. v.s. Neg. w/o sym.",
            Task::Task4 => "4. Pos. w/ sym. v.s. Neg. w/ sym.",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::Config(format!("unknown task {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub task: Task,
    /// Upper bound on days since a positive test for "new" positives.
    pub recency_days: u32,
}

impl TaskSpec {
    pub fn new(task: Task) -> Self {
        Self {
            task,
            recency_days: 14,
        }
    }

    pub fn with_recency(task: Task, recency_days: u32) -> Result<Self> {
        if recency_days == 0 {
            return Err(Error::Config("recency_days must be positive".into()));
        }
        Ok(Self { task, recency_days })
    }

    /// Task filter for one record; `None` means the record is excluded.
    pub fn label_for(&self, r: &SampleRecord) -> Option<Label> {
        let label = Label::from(r.test_status);
        let keep = match (self.task, r.test_status) {
            (Task::Task1, _) => true,
            (Task::Task2, TestStatus::Positive) => {
                r.days_since_test.is_some_and(|d| d <= self.recency_days)
            }
            (Task::Task2 | Task::Task3, TestStatus::Negative) => !r.is_symptomatic(),
            (Task::Task3, TestStatus::Positive) => !r.is_symptomatic(),
            (Task::Task4, _) => r.is_symptomatic(),
        };
        keep.then_some(label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledRecord {
    pub record: SampleRecord,
    pub label: Label,
}

/// Task cohort: the records that pass a task filter, each with its label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSet {
    pub spec: TaskSpec,
    pub records: Vec<LabeledRecord>,
}

impl LabeledSet {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.records.iter().filter(|r| r.label == label).count()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.records.iter().map(|r| r.label).collect()
    }

    /// Keeps the records matching `keep`, failing if a class disappears.
    pub fn retain<F>(mut self, what: &str, keep: F) -> Result<Self>
    where
        F: Fn(&LabeledRecord) -> bool,
    {
        self.records.retain(|r| keep(r));
        check_nonempty(&self, &format!("{} ({what})", self.spec.task))?;
        Ok(self)
    }
}

fn check_nonempty(set: &LabeledSet, task: &str) -> Result<()> {
    for (label, name) in [(Label::Positive, "positive"), (Label::Negative, "negative")] {
        if set.count(label) == 0 {
            return Err(Error::EmptyCohort {
                task: task.to_string(),
                class: name.to_string(),
            });
        }
    }
    Ok(())
}

/// Filters records into a task cohort; each sample keeps its own test status
/// as its label.
pub fn build_cohort(records: &[SampleRecord], spec: TaskSpec) -> Result<LabeledSet> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no records".into()));
    }
    let set = LabeledSet {
        spec,
        records: records
            .iter()
            .filter_map(|r| {
                spec.label_for(r).map(|label| LabeledRecord {
                    record: r.clone(),
                    label,
                })
            })
            .collect(),
    };
    check_nonempty(&set, spec.task.id())?;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn record(id: &str, status: TestStatus, days: Option<u32>, symptoms: &[&str]) -> SampleRecord {
        SampleRecord {
            sample_id: id.into(),
            participant_id: format!("p-{id}"),
            audio_path: PathBuf::from(format!("{id}.wav")),
            test_status: status,
            days_since_test: days,
            symptoms: symptoms.iter().map(|s| s.to_string()).collect(),
            hospitalized: false,
        }
    }

    #[test]
    fn task3_needs_asymptomatic_positive() {
        let records = vec![
            record("a", TestStatus::Positive, Some(3), &["fever"]),
            record("b", TestStatus::Negative, Some(3), &[]),
        ];
        match build_cohort(&records, TaskSpec::new(Task::Task3)) {
            Err(Error::EmptyCohort { task, class }) => {
                assert_eq!(task, "task3");
                assert_eq!(class, "positive");
            }
            other => panic!("unexpected {other:?}"),
        }
        let set = build_cohort(&records, TaskSpec::new(Task::Task2)).unwrap();
        assert_eq!((set.count(Label::Positive), set.count(Label::Negative)), (1, 1));
    }

    #[test]
    fn task2_recency_and_unknown_days() {
        let records = vec![
            record("a", TestStatus::Positive, Some(14), &[]),
            record("b", TestStatus::Positive, Some(15), &[]),
            record("c", TestStatus::Positive, None, &[]),
            record("d", TestStatus::Negative, Some(100), &[]),
            record("e", TestStatus::Negative, Some(1), &["fever"]),
        ];
        let set = build_cohort(&records, TaskSpec::new(Task::Task2)).unwrap();
        let ids: Vec<&str> = set.records.iter().map(|r| r.record.sample_id.as_str()).collect();
        assert_eq!(ids, vec!["a", "d"]);
    }

    #[test]
    fn task_parsing() {
        assert_eq!("task4".parse::<Task>().unwrap(), Task::Task4);
        assert!("task5".parse::<Task>().is_err());
        assert_eq!(Label::from_score(0.0), Label::Positive);
        assert_eq!(Label::from_score(-1e-12), Label::Negative);
    }
}
