//! Feature store: one CSV row of 384 functionals per accepted sample.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::features::{track_names, FeatureVector, FEATURE_DIM, FUNCTIONAL_NAMES};

pub const STORE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub sample_id: String,
    pub participant_id: String,
    pub label: Label,
    pub features: FeatureVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnInfo {
    pub column: String,
    pub track: String,
    pub functional: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSidecar {
    pub format_version: u32,
    pub columns: Vec<ColumnInfo>,
}

pub fn column_id(i: usize) -> String {
    format!("f{i:03}")
}

pub fn column_sidecar() -> ColumnSidecar {
    let mut columns = Vec::with_capacity(FEATURE_DIM);
    for track in track_names() {
        for functional in FUNCTIONAL_NAMES {
            columns.push(ColumnInfo {
                column: column_id(columns.len()),
                track: track.clone(),
                functional: functional.to_string(),
            });
        }
    }
    ColumnSidecar {
        format_version: STORE_FORMAT_VERSION,
        columns,
    }
}

/// `features.csv` → `features.columns.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    let stem = csv_path.file_stem().and_then(|s| s.to_str()).unwrap_or("features");
    csv_path.with_file_name(format!("{stem}.columns.json"))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureStore {
    rows: Vec<FeatureRow>,
    index: HashMap<String, usize>,
}

impl FeatureStore {
    pub fn new(rows: Vec<FeatureRow>) -> Result<Self> {
        let mut store = Self::default();
        for row in rows {
            store.push(row)?;
        }
        Ok(store)
    }

    pub fn push(&mut self, row: FeatureRow) -> Result<()> {
        if self.index.contains_key(&row.sample_id) {
            return Err(Error::FeatureStore {
                row: self.rows.len() + 2,
                message: format!("duplicate sample_id {:?}", row.sample_id),
            });
        }
        self.index.insert(row.sample_id.clone(), self.rows.len());
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[FeatureRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, sample_id: &str) -> Option<&FeatureRow> {
        self.index.get(sample_id).map(|&i| &self.rows[i])
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["sample_id".to_string(), "participant_id".into(), "label".into()];
        header.extend((0..FEATURE_DIM).map(column_id));
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![
                row.sample_id.clone(),
                row.participant_id.clone(),
                row.label.as_str().to_string(),
            ];
            rec.extend(row.features.as_slice().iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        let expected_len = 3 + FEATURE_DIM;
        let header_ok = header.len() == expected_len
            && header.get(0) == Some("sample_id")
            && header.get(1) == Some("participant_id")
            && header.get(2) == Some("label")
            && (0..FEATURE_DIM).all(|i| header.get(3 + i) == Some(column_id(i).as_str()));
        if !header_ok {
            return Err(Error::FeatureStore {
                row: 1,
                message: format!("expected header sample_id,participant_id,label,f000..f{:03}", FEATURE_DIM - 1),
            });
        }
        let mut store = Self::default();
        for (i, rec) in r.records().enumerate() {
            let line = i + 2;
            let rec = rec?;
            let err = |message: String| Error::FeatureStore { row: line, message };
            if rec.len() != expected_len {
                return Err(err(format!("expected {expected_len} fields, got {}", rec.len())));
            }
            let label = Label::parse(&rec[2]).ok_or_else(|| err(format!("bad label {:?}", &rec[2])))?;
            let values = (0..FEATURE_DIM)
                .map(|j| {
                    rec[3 + j]
                        .trim()
                        .parse::<f64>()
                        .map_err(|_| err(format!("bad value {:?} in {}", &rec[3 + j], column_id(j))))
                })
                .collect::<Result<Vec<f64>>>()?;
            let features = FeatureVector::new(values).map_err(|e| err(e.to_string()))?;
            store
                .push(FeatureRow {
                    sample_id: rec[0].to_string(),
                    participant_id: rec[1].to_string(),
                    label,
                    features,
                })
                .map_err(|_| err(format!("duplicate sample_id {:?}", &rec[0])))?;
        }
        Ok(store)
    }

    /// Writes the CSV and its column sidecar next to it.
    pub fn save(&self, csv_path: impl AsRef<Path>) -> Result<()> {
        let csv_path = csv_path.as_ref();
        self.write_csv(File::create(csv_path)?)?;
        fs::write(sidecar_path(csv_path), serde_json::to_string_pretty(&column_sidecar())?)?;
        Ok(())
    }

    pub fn load(csv_path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(File::open(csv_path)?)
    }
}
