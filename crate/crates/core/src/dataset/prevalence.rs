use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::manifest::{SampleRecord, TestStatus};
use crate::features::SymptomVocabulary;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrevalenceRow {
    pub symptom: String,
    /// Percentage of positive participants reporting the symptom; `None`
    /// when there are no positive participants.
    pub positive_pct: Option<f64>,
    pub negative_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrevalenceReport {
    pub positive_participants: usize,
    pub negative_participants: usize,
    pub rows: Vec<PrevalenceRow>,
}

/// Per-symptom share of participants reporting it, by test status.
///
/// Counting is per participant: a participant belongs to a group if any of
/// their samples carries that status, and reports a symptom if any of those
/// samples lists it.
pub fn symptom_prevalence(records: &[SampleRecord], vocab: &SymptomVocabulary) -> PrevalenceReport {
    let mut groups: BTreeMap<TestStatus, BTreeMap<&str, BTreeSet<&str>>> = BTreeMap::new();
    for r in records {
        groups
            .entry(r.test_status)
            .or_default()
            .entry(r.participant_id.as_str())
            .or_default()
            .extend(r.symptoms.iter().map(String::as_str));
    }
    let size = |s: TestStatus| groups.get(&s).map_or(0, BTreeMap::len);
    let pct = |s: TestStatus, symptom: &str| {
        let g = groups.get(&s)?;
        let hits = g.values().filter(|set| set.contains(symptom)).count();
        Some(100.0 * hits as f64 / g.len() as f64)
    };

    PrevalenceReport {
        positive_participants: size(TestStatus::Positive),
        negative_participants: size(TestStatus::Negative),
        rows: vocab
            .names()
            .iter()
            .map(|name| PrevalenceRow {
                symptom: name.clone(),
                positive_pct: pct(TestStatus::Positive, name),
                negative_pct: pct(TestStatus::Negative, name),
            })
            .collect(),
    }
}

fn fmt_pct(p: Option<f64>) -> String {
    p.map_or_else(|| "NA".to_string(), |v| format!("{v:.2}"))
}

impl PrevalenceReport {
    pub fn to_csv(&self) -> String {
        let mut csv = csv::Writer::from_writer(Vec::new());
        csv.write_record(["symptom", "positive_pct", "negative_pct"])
            .expect("in-memory write");
        for row in &self.rows {
            csv.write_record([
                row.symptom.clone(),
                fmt_pct(row.positive_pct),
                fmt_pct(row.negative_pct),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(csv.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    /// Horizontal bar chart, one pair of bars per symptom (1 char = 2%).
    pub fn render_bars(&self) -> String {
        let width = self.rows.iter().map(|r| r.symptom.len()).max().unwrap_or(0);
        let bar = |p: Option<f64>| match p {
            Some(v) => format!("{:<50} {v:6.2}%", "#".repeat((v / 2.0).round() as usize)),
            None => format!("{:<50}     NA", ""),
        };
        let mut out = format!(
            "Symptom prevalence (positive n={}, negative n={})\n",
            self.positive_participants, self.negative_participants
        );
        for row in &self.rows {
            let _ = writeln!(out, "{:<width$}  pos |{}", row.symptom, bar(row.positive_pct));
            let _ = writeln!(out, "{:<width$}  neg |{}", "", bar(row.negative_pct));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn rec(sample: &str, participant: &str, status: TestStatus, symptoms: &[&str]) -> SampleRecord {
        SampleRecord {
            sample_id: sample.into(),
            participant_id: participant.into(),
            audio_path: PathBuf::new(),
            test_status: status,
            days_since_test: None,
            symptoms: symptoms.iter().map(|s| s.to_string()).collect(),
            hospitalized: false,
        }
    }

    fn row<'a>(r: &'a PrevalenceReport, name: &str) -> &'a PrevalenceRow {
        r.rows.iter().find(|x| x.symptom == name).unwrap()
    }

    #[test]
    fn participant_level_counting() {
        let vocab = SymptomVocabulary::default();
        let records = vec![
            rec("s1", "p1", TestStatus::Positive, &["fever"]),
            rec("s2", "p1", TestStatus::Positive, &["fever"]),
            rec("s3", "p2", TestStatus::Positive, &[]),
        ];
        let report = symptom_prevalence(&records, &vocab);
        assert_eq!(row(&report, "fever").positive_pct, Some(50.0));
        assert_eq!(row(&report, "fever").negative_pct, None);
        assert_eq!(report.negative_participants, 0);
        assert!(report.to_csv().contains("fever,50.00,NA"));
    }

    #[test]
    fn duplicating_samples_does_not_change_percentages() {
        let vocab = SymptomVocabulary::default();
        let mut records = vec![
            rec("s1", "p1", TestStatus::Positive, &["fever", "headache"]),
            rec("s2", "p2", TestStatus::Negative, &["headache"]),
            rec("s3", "p3", TestStatus::Negative, &[]),
        ];
        let before = symptom_prevalence(&records, &vocab);
        records.push(rec("s4", "p2", TestStatus::Negative, &["headache"]));
        assert_eq!(symptom_prevalence(&records, &vocab), before);
        for r in &before.rows {
            for p in [r.positive_pct, r.negative_pct].into_iter().flatten() {
                assert!((0.0..=100.0).contains(&p));
            }
        }
    }
}
