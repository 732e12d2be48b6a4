//! Case-by-feature tables and their CSV form.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::format::{parse_value, sig9};

/// Rows are cases, columns are feature IDs.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    case_ids: Vec<String>,
    feature_ids: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl FeatureTable {
    pub fn new(case_ids: Vec<String>, feature_ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if case_ids.len() != rows.len() {
            return Err(Error::LengthMismatch(case_ids.len(), rows.len()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != feature_ids.len()) {
            return Err(Error::LengthMismatch(feature_ids.len(), r.len()));
        }
        Ok(FeatureTable {
            case_ids,
            feature_ids,
            rows,
        })
    }

    pub fn case_ids(&self) -> &[String] {
        &self.case_ids
    }

    pub fn feature_ids(&self) -> &[String] {
        &self.feature_ids
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn n_cases(&self) -> usize {
        self.rows.len()
    }

    pub fn feature_index(&self, id: &str) -> Option<usize> {
        self.feature_ids.iter().position(|f| f == id)
    }

    pub fn column(&self, id: &str) -> Result<Vec<f64>> {
        let j = self
            .feature_index(id)
            .ok_or_else(|| Error::UnknownFeature(id.to_string()))?;
        Ok(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn row(&self, case_id: &str) -> Option<&[f64]> {
        self.case_ids
            .iter()
            .position(|c| c == case_id)
            .map(|i| self.rows[i].as_slice())
    }

    /// Same cases, rows reordered to follow `order`.
    pub fn reordered(&self, order: &[String]) -> Result<FeatureTable> {
        let mut rows = Vec::with_capacity(order.len());
        for c in order {
            let r = self
                .row(c)
                .ok_or_else(|| Error::CaseSetMismatch(format!("case {c} missing")))?;
            rows.push(r.to_vec());
        }
        FeatureTable::new(order.to_vec(), self.feature_ids.clone(), rows)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["case_id".to_string()];
        header.extend(self.feature_ids.iter().cloned());
        w.write_record(&header)?;
        for (c, r) in self.case_ids.iter().zip(&self.rows) {
            let mut rec = vec![c.clone()];
            rec.extend(r.iter().map(|&x| sig9(x)));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<FeatureTable> {
        let path = path.as_ref();
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = csv::Reader::from_reader(file);
        let header = r.headers()?.clone();
        if header.get(0) != Some("case_id") {
            return Err(Error::Manifest(format!("{}: first column must be case_id", path.display())));
        }
        let feature_ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let (mut case_ids, mut rows) = (Vec::new(), Vec::new());
        for rec in r.records() {
            let rec = rec?;
            case_ids.push(rec[0].to_string());
            let row = rec
                .iter()
                .skip(1)
                .map(|s| parse_value(s).ok_or_else(|| Error::Manifest(format!("bad value {s:?}"))))
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        FeatureTable::new(case_ids, feature_ids, rows)
    }
}
