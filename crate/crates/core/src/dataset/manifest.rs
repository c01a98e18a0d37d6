use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MANIFEST_HEADER: [&str; 7] = [
    "sample_id",
    "participant_id",
    "audio_path",
    "test_status",
    "days_since_test",
    "symptoms",
    "hospitalized",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestStatus {
    Positive,
    Negative,
}

impl TestStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TestStatus::Positive => "positive",
            TestStatus::Negative => "negative",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" => Some(TestStatus::Positive),
            "negative" => Some(TestStatus::Negative),
            _ => None,
        }
    }
}

/// One recording's metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub sample_id: String,
    pub participant_id: String,
    pub audio_path: PathBuf,
    pub test_status: TestStatus,
    /// `None` when the participant did not report a test date.
    pub days_since_test: Option<u32>,
    /// Reported symptoms; empty means "None" was selected.
    pub symptoms: BTreeSet<String>,
    pub hospitalized: bool,
}

impl SampleRecord {
    pub fn is_symptomatic(&self) -> bool {
        !self.symptoms.is_empty()
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" | "" => Some(false),
        _ => None,
    }
}

/// Parses a manifest CSV. Row numbers in errors are file line numbers.
pub fn parse_manifest<R: Read>(reader: R) -> Result<Vec<SampleRecord>> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = csv.headers()?.clone();
    let mut columns = [0usize; 7];
    for (slot, name) in columns.iter_mut().zip(MANIFEST_HEADER) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Manifest {
                row: 1,
                message: format!("missing column {name:?}"),
            })?;
    }
    let [c_sample, c_participant, c_path, c_status, c_days, c_symptoms, c_hosp] = columns;

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for row in csv.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let err = |message: String| Error::Manifest { row: line, message };
        let field = |i: usize| row.get(i).unwrap_or("");

        let sample_id = field(c_sample).to_string();
        if sample_id.is_empty() {
            return Err(err("empty sample_id".into()));
        }
        if !seen.insert(sample_id.clone()) {
            return Err(err(format!("duplicate sample_id {sample_id:?}")));
        }
        let participant_id = field(c_participant).to_string();
        if participant_id.is_empty() {
            return Err(err("empty participant_id".into()));
        }
        let test_status = TestStatus::parse(field(c_status))
            .ok_or_else(|| err(format!("bad test_status {:?}", field(c_status))))?;
        let days_since_test = match field(c_days) {
            "" => None,
            s => Some(
                s.parse::<u32>()
                    .map_err(|_| err(format!("bad days_since_test {s:?}")))?,
            ),
        };
        let symptoms = field(c_symptoms)
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        let hospitalized = parse_bool(field(c_hosp))
            .ok_or_else(|| err(format!("bad hospitalized flag {:?}", field(c_hosp))))?;

        records.push(SampleRecord {
            sample_id,
            participant_id,
            audio_path: PathBuf::from(field(c_path)),
            test_status,
            days_since_test,
            symptoms,
            hospitalized,
        });
    }
    Ok(records)
}

pub fn write_manifest<W: Write>(writer: W, records: &[SampleRecord]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(MANIFEST_HEADER)?;
    for r in records {
        let symptoms = r.symptoms.iter().map(String::as_str).collect::<Vec<_>>().join(";");
        let days = r.days_since_test.map(|d| d.to_string()).unwrap_or_default();
        csv.write_record([
            r.sample_id.as_str(),
            r.participant_id.as_str(),
            &r.audio_path.to_string_lossy(),
            r.test_status.as_str(),
            &days,
            &symptoms,
            if r.hospitalized { "true" } else { "false" },
        ])?;
    }
    csv.flush()?;
    Ok(())
}

/// Parsed manifest plus the directory relative audio paths resolve against.
#[derive(Debug, Clone)]
pub struct Manifest {
    pub records: Vec<SampleRecord>,
    pub base_dir: PathBuf,
}

impl Manifest {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let records = parse_manifest(File::open(path)?)?;
        let base_dir = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(Self { records, base_dir })
    }

    pub fn audio_path(&self, record: &SampleRecord) -> PathBuf {
        if record.audio_path.is_absolute() {
            record.audio_path.clone()
        } else {
            self.base_dir.join(&record.audio_path)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "sample_id,participant_id,audio_path,test_status,days_since_test,symptoms,hospitalized\n";

    #[test]
    fn parses_example_row() {
        let text = format!("{HEADER}s1,p1,a.wav,positive,3,fever;dry cough,false\ns2,p2,b.wav,negative,,,true\n");
        let records = parse_manifest(text.as_bytes()).unwrap();
        assert_eq!(records.len(), 2);
        let r = &records[0];
        assert_eq!(r.symptoms.len(), 2);
        assert!(r.symptoms.contains("dry cough"));
        assert_eq!(r.days_since_test, Some(3));
        assert_eq!(r.test_status, TestStatus::Positive);
        assert!(records[1].symptoms.is_empty());
        assert_eq!(records[1].days_since_test, None);
        assert!(records[1].hospitalized);
    }

    #[test]
    fn rejects_duplicates_and_bad_values() {
        let dup = format!("{HEADER}s1,p1,a.wav,positive,3,,false\ns1,p2,b.wav,negative,1,,false\n");
        match parse_manifest(dup.as_bytes()) {
            Err(Error::Manifest { row, message }) => {
                assert_eq!(row, 3);
                assert!(message.contains("duplicate"));
            }
            other => panic!("unexpected {other:?}"),
        }

        let bad = format!("{HEADER}s1,p1,a.wav,maybe,3,,false\n");
        assert!(matches!(parse_manifest(bad.as_bytes()), Err(Error::Manifest { row: 2, .. })));

        let missing = "sample_id,participant_id,audio_path\ns1,p1,a.wav\n";
        assert!(matches!(parse_manifest(missing.as_bytes()), Err(Error::Manifest { .. })));
    }

    #[test]
    fn write_then_parse() {
        let text = format!("{HEADER}s1,p1,a.wav,positive,3,dry cough;fever,false\ns2,p2,b.wav,negative,,,true\n");
        let records = parse_manifest(text.as_bytes()).unwrap();
        let mut out = Vec::new();
        write_manifest(&mut out, &records).unwrap();
        assert_eq!(String::from_utf8(out.clone()).unwrap(), text);
        assert_eq!(parse_manifest(out.as_slice()).unwrap(), records);
    }
}
