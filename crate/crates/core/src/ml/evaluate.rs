//! Repeated stratified train/validation/test evaluation of PCA + forest.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::forest::{accuracy, forest_fit, ForestParams};
use super::pca::{pca_fit, PcaConfig};
use super::roc::{auc_roc, RocPoint};
use crate::error::{Error, Result};
use crate::radiomics::FeatureTable;
use crate::rng::{stream, Purpose};
use crate::volume::{CaseRecord, Label};

/// Feature matrix with binary labels (`low` = 0, `high` = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub case_ids: Vec<String>,
    pub feature_ids: Vec<String>,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<u8>,
}

impl Dataset {
    pub fn new(case_ids: Vec<String>, feature_ids: Vec<String>, x: Vec<Vec<f64>>, y: Vec<u8>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch(x.len(), y.len()));
        }
        if case_ids.len() != x.len() {
            return Err(Error::LengthMismatch(case_ids.len(), x.len()));
        }
        if let Some(r) = x.iter().find(|r| r.len() != feature_ids.len()) {
            return Err(Error::LengthMismatch(feature_ids.len(), r.len()));
        }
        if x.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite feature value".into()));
        }
        if y.iter().any(|&c| c > 1) {
            return Err(Error::InvalidParameter("labels must be 0 or 1".into()));
        }
        Ok(Dataset {
            case_ids,
            feature_ids,
            x,
            y,
        })
    }

    /// Rows of `table` labelled from the manifest; every case needs a label.
    pub fn from_table(table: &FeatureTable, records: &[CaseRecord]) -> Result<Self> {
        let labels: HashMap<&str, Option<Label>> =
            records.iter().map(|r| (r.case_id.as_str(), r.label)).collect();
        let mut y = Vec::with_capacity(table.n_cases());
        for c in table.case_ids() {
            match labels.get(c.as_str()) {
                Some(Some(l)) => y.push(l.as_class()),
                Some(None) => return Err(Error::Manifest(format!("case {c} has no label"))),
                None => return Err(Error::CaseSetMismatch(format!("case {c} not in manifest"))),
            }
        }
        Dataset::new(
            table.case_ids().to_vec(),
            table.feature_ids().to_vec(),
            table.rows().to_vec(),
            y,
        )
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Same features, labels shuffled with a seeded stream.
    pub fn permuted_labels(&self, seed: u64) -> Dataset {
        let mut y = self.y.clone();
        y.shuffle(&mut stream(seed, 0, Purpose::Permute));
        Dataset { y, ..self.clone() }
    }

    fn rows(&self, idx: &[usize]) -> (Vec<Vec<f64>>, Vec<u8>) {
        (idx.iter().map(|&i| self.x[i].clone()).collect(), idx.iter().map(|&i| self.y[i]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub repeats: usize,
    pub train_fraction: f64,
    pub validation_fraction: f64,
    pub test_fraction: f64,
    pub pca: PcaConfig,
    pub forest: ForestParams,
    /// Depths tried on the validation stratum; ties go to the shallower one.
    pub depth_candidates: Vec<usize>,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            repeats: 5,
            train_fraction: 0.75,
            validation_fraction: 0.10,
            test_fraction: 0.15,
            pca: PcaConfig::default(),
            forest: ForestParams::default(),
            depth_candidates: vec![2, 4, 8, 12],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatResult {
    pub repeat: usize,
    pub n_train: usize,
    pub n_validation: usize,
    pub n_test: usize,
    pub n_components: usize,
    pub selected_depth: usize,
    pub validation_accuracy: f64,
    pub accuracy: f64,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub accuracy_mean: f64,
    pub accuracy_sd: f64,
    pub auc_mean: f64,
    pub auc_sd: f64,
    pub repeats: Vec<RepeatResult>,
    /// Pooled test predictions of all repeats.
    #[serde(skip)]
    pub roc: Vec<RocPoint>,
}

impl ClassificationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(crate::format::to_json_pretty(self)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }
}

/// Indices of the train, validation and test strata.
pub struct Split {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

/// Per class: shuffle, then take `max(1, round(f n_c))` cases for validation
/// and for test; the rest train.
pub fn stratified_split(y: &[u8], cfg: &EvalConfig, repeat: usize) -> Result<Split> {
    let mut rng = stream(cfg.seed, repeat as u64, Purpose::Split);
    let mut s = Split {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
    };
    for class in [0u8, 1] {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        let n = idx.len() as f64;
        let n_val = ((cfg.validation_fraction * n).round() as usize).max(1);
        let n_test = ((cfg.test_fraction * n).round() as usize).max(1);
        if idx.len() < n_val + n_test + 1 {
            let stratum = if idx.len() <= n_test {
                "test"
            } else if idx.len() <= n_test + n_val {
                "validation"
            } else {
                "train"
            };
            return Err(Error::ClassAbsent { class, stratum });
        }
        s.test.extend_from_slice(&idx[..n_test]);
        s.validation.extend_from_slice(&idx[n_test..n_test + n_val]);
        s.train.extend_from_slice(&idx[n_test + n_val..]);
    }
    s.train.sort_unstable();
    s.validation.sort_unstable();
    s.test.sort_unstable();
    Ok(s)
}

fn run_repeat(ds: &Dataset, cfg: &EvalConfig, repeat: usize) -> Result<(RepeatResult, Vec<f64>, Vec<u8>)> {
    let split = stratified_split(&ds.y, cfg, repeat)?;
    let (x_tr, y_tr) = ds.rows(&split.train);
    let (x_va, y_va) = ds.rows(&split.validation);
    let (x_te, y_te) = ds.rows(&split.test);
    let pca = pca_fit(&x_tr, &cfg.pca)?;
    let (s_tr, s_va, s_te) = (pca.transform(&x_tr)?, pca.transform(&x_va)?, pca.transform(&x_te)?);
    let forest_seed = cfg.seed.wrapping_add(1_000_003u64.wrapping_mul(repeat as u64 + 1));

    let mut best: Option<(usize, f64, super::forest::ForestModel)> = None;
    for &depth in &cfg.depth_candidates {
        let params = ForestParams {
            max_depth: depth,
            ..cfg.forest
        };
        let model = forest_fit(&s_tr, &y_tr, &params, forest_seed)?;
        let acc = accuracy(&model.predict(&s_va)?, &y_va);
        if best.as_ref().is_none_or(|b| acc > b.1) {
            best = Some((depth, acc, model));
        }
    }
    let (depth, val_acc, model) =
        best.ok_or_else(|| Error::InvalidParameter("no depth candidates".into()))?;
    let proba = model.predict_proba(&s_te)?;
    let pred: Vec<u8> = proba.iter().map(|&p| u8::from(p >= 0.5)).collect();
    let (auc, _) = auc_roc(&proba, &y_te)?;
    Ok((
        RepeatResult {
            repeat,
            n_train: split.train.len(),
            n_validation: split.validation.len(),
            n_test: split.test.len(),
            n_components: pca.n_components(),
            selected_depth: depth,
            validation_accuracy: val_acc,
            accuracy: accuracy(&pred, &y_te),
            auc,
        },
        proba,
        y_te,
    ))
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, sd)
}

pub fn evaluate(ds: &Dataset, cfg: &EvalConfig) -> Result<ClassificationReport> {
    if ds.len() < 20 {
        return Err(Error::TooFewSamples {
            needed: 20,
            got: ds.len(),
        });
    }
    if cfg.repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be positive".into()));
    }
    let runs = (0..cfg.repeats)
        .into_par_iter()
        .map(|r| run_repeat(ds, cfg, r))
        .collect::<Result<Vec<_>>>()?;
    let acc: Vec<f64> = runs.iter().map(|r| r.0.accuracy).collect();
    let aucs: Vec<f64> = runs.iter().map(|r| r.0.auc).collect();
    let scores: Vec<f64> = runs.iter().flat_map(|r| r.1.iter().copied()).collect();
    let labels: Vec<u8> = runs.iter().flat_map(|r| r.2.iter().copied()).collect();
    let (_, roc) = auc_roc(&scores, &labels)?;
    let (accuracy_mean, accuracy_sd) = mean_sd(&acc);
    let (auc_mean, auc_sd) = mean_sd(&aucs);
    Ok(ClassificationReport {
        accuracy_mean,
        accuracy_sd,
        auc_mean,
        auc_sd,
        repeats: runs.into_iter().map(|r| r.0).collect(),
        roc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(n: usize) -> Dataset {
        let x: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64, (i % 3) as f64]).collect();
        let y: Vec<u8> = (0..n).map(|i| u8::from(i >= n / 2)).collect();
        Dataset::new((0..n).map(|i| format!("c{i}")).collect(), vec!["a".into(), "b".into()], x, y).unwrap()
    }

    #[test]
    fn split_is_stratified_partition() {
        let ds = tiny(40);
        let s = stratified_split(&ds.y, &EvalConfig::default(), 0).unwrap();
        let mut all: Vec<usize> = s.train.iter().chain(&s.validation).chain(&s.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..40).collect::<Vec<_>>());
        for part in [&s.train, &s.validation, &s.test] {
            assert!(part.iter().any(|&i| ds.y[i] == 0) && part.iter().any(|&i| ds.y[i] == 1));
        }
        assert_eq!(s.test.len(), 6);
        assert_eq!(s.validation.len(), 4);
    }

    #[test]
    fn absent_class_is_reported() {
        let mut y = vec![0u8; 30];
        y[0] = 1;
        y[1] = 1;
        assert!(matches!(
            stratified_split(&y, &EvalConfig::default(), 0),
            Err(Error::ClassAbsent { class: 1, .. })
        ));
    }

    #[test]
    fn too_small() {
        assert!(matches!(evaluate(&tiny(10), &EvalConfig::default()), Err(Error::TooFewSamples { .. })));
    }
}
