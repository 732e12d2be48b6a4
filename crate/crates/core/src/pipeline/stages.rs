//! One function per pipeline stage. Each reads its inputs from disk and
//! writes its artifacts into a directory.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::PreprocessParams;
use crate::error::{Error, Result};
use crate::fidelity::{
    assign_groups, correlate_cohorts, CorrelationTable, GroupAssignment, GroupRule, NetworkCorrelations,
    NetworkProfile,
};
use crate::format::{mean_sd, sig9};
use crate::ml::{evaluate, write_roc_csv, ClassificationReport, Dataset, EvalConfig};
use crate::preprocess::{minmax_normalize, resample, resample_mask, spacing_for_dims, Interpolation};
use crate::quality::{quality_report, QualityReport, SsimConfig};
use crate::radiomics::{extract_cohort, FeatureTable};
use crate::volume::{read_manifest, read_mask, read_volume, write_manifest, write_mask, write_volume, CaseRecord, HasGrid};

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Normalize and resample every case of `manifest` into `out_dir`; returns
/// the new manifest path.
pub fn preprocess_cohort(manifest: &Path, params: &PreprocessParams, out_dir: &Path) -> Result<PathBuf> {
    let records = read_manifest(manifest)?;
    create_dir(out_dir)?;
    let out = records
        .par_iter()
        .map(|r| {
            let mut v = read_volume(&r.volume_path)?;
            let mut m = read_mask(&r.mask_path)?;
            crate::volume::validate_pair(&v, &m)?;
            if let Some(dims) = params.dims {
                let spacing = params.spacing_mm.unwrap_or_else(|| spacing_for_dims(v.grid(), dims));
                v = resample(&v, dims, spacing, Interpolation::Trilinear)?;
                m = resample_mask(&m, dims, spacing)?;
            }
            if params.normalize {
                v = minmax_normalize(&v);
            }
            let vp = out_dir.join(format!("{}.json", r.case_id));
            let mp = out_dir.join(format!("{}_mask.json", r.case_id));
            write_volume(&v, &vp)?;
            write_mask(&m, &mp)?;
            Ok(CaseRecord {
                case_id: r.case_id.clone(),
                volume_path: vp,
                mask_path: mp,
                label: r.label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let path = out_dir.join("manifest.csv");
    write_manifest(&path, &out)?;
    Ok(path)
}

/// Quality metrics of one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseQuality {
    pub case_id: String,
    #[serde(flatten)]
    pub report: QualityReport,
}

/// Metrics for every case of `reference`, paired by case ID with `candidate`.
pub fn quality_cohort(reference: &Path, candidate: &Path, cfg: &SsimConfig) -> Result<Vec<CaseQuality>> {
    let refs = read_manifest(reference)?;
    let cands: HashMap<String, CaseRecord> = read_manifest(candidate)?
        .into_iter()
        .map(|r| (r.case_id.clone(), r))
        .collect();
    if cands.len() != refs.len() || refs.iter().any(|r| !cands.contains_key(&r.case_id)) {
        return Err(Error::CaseSetMismatch(format!(
            "{} and {} list different cases",
            reference.display(),
            candidate.display()
        )));
    }
    refs.par_iter()
        .map(|r| {
            let a = read_volume(&r.volume_path)?;
            let b = read_volume(&cands[&r.case_id].volume_path)?;
            Ok(CaseQuality {
                case_id: r.case_id.clone(),
                report: quality_report(&a, &b, cfg)?,
            })
        })
        .collect()
}

/// Mean and sample SD; equal values (including infinities) give SD 0.
pub fn mean_and_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return (xs[0], 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, sd)
}

/// Mean ± SD of each metric over a cohort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualitySummary {
    pub mae: [f64; 2],
    pub mse: [f64; 2],
    /// JSON writes an infinite PSNR as null; read back as infinity.
    #[serde(deserialize_with = "null_as_inf")]
    pub psnr_db: [f64; 2],
    pub ssim: [f64; 2],
}

fn null_as_inf<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<[f64; 2], D::Error> {
    let v: [Option<f64>; 2] = Deserialize::deserialize(d)?;
    Ok(v.map(|x| x.unwrap_or(f64::INFINITY)))
}

pub fn summarize_quality(rows: &[CaseQuality]) -> QualitySummary {
    let col = |f: fn(&QualityReport) -> f64| {
        let (m, s) = mean_and_sd(&rows.iter().map(|r| f(&r.report)).collect::<Vec<_>>());
        [m, s]
    };
    QualitySummary {
        mae: col(|r| r.mae),
        mse: col(|r| r.mse),
        psnr_db: col(|r| r.psnr_db),
        ssim: col(|r| r.ssim),
    }
}

/// `case_id,mae,mse,psnr_db,ssim`, one row per case and a final `mean±sd` row.
pub fn write_quality_csv(path: &Path, rows: &[CaseQuality]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["case_id", "mae", "mse", "psnr_db", "ssim"])?;
    for r in rows {
        let q = &r.report;
        w.write_record([r.case_id.clone(), sig9(q.mae), sig9(q.mse), sig9(q.psnr_db), sig9(q.ssim)])?;
    }
    let s = summarize_quality(rows);
    w.write_record([
        "mean±sd".to_string(),
        mean_sd(s.mae[0], s.mae[1]),
        mean_sd(s.mse[0], s.mse[1]),
        mean_sd(s.psnr_db[0], s.psnr_db[1]),
        mean_sd(s.ssim[0], s.ssim[1]),
    ])?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Extract all features of a manifest's cases and write the table.
pub fn extract_to_csv(manifest: &Path, n_bins: u32, out: &Path) -> Result<FeatureTable> {
    let records = read_manifest(manifest)?;
    let table = extract_cohort(&records, n_bins)?;
    table.write_csv(out)?;
    Ok(table)
}

pub fn correlate_to_csv(reference: &Path, candidate: &Path, out: &Path) -> Result<CorrelationTable> {
    let t = correlate_cohorts(&FeatureTable::read_csv(reference)?, &FeatureTable::read_csv(candidate)?)?;
    t.write_csv(out)?;
    Ok(t)
}

/// Group assignment written as `groups.json` and `groups_summary.csv` under `out_dir`.
pub fn group_to_files(
    tables: &[NetworkCorrelations],
    profiles: &[NetworkProfile],
    tau: f64,
    rule: GroupRule,
    out_dir: &Path,
) -> Result<GroupAssignment> {
    let g = assign_groups(tables, profiles, tau, rule)?;
    create_dir(out_dir)?;
    g.write_json(out_dir.join("groups.json"))?;
    g.write_summary_csv(out_dir.join("groups_summary.csv"))?;
    Ok(g)
}

/// Classify from a feature table labelled by a manifest; writes
/// `classification_<name>.json` and `roc_<name>.csv` under `out_dir`.
pub fn classify_to_files(
    features: &FeatureTable,
    manifest: &Path,
    cfg: &EvalConfig,
    name: &str,
    out_dir: &Path,
) -> Result<(ClassificationReport, PathBuf, PathBuf)> {
    let ds = Dataset::from_table(features, &read_manifest(manifest)?)?;
    let report = evaluate(&ds, cfg)?;
    create_dir(out_dir)?;
    let json = out_dir.join(format!("classification_{name}.json"));
    let roc = out_dir.join(format!("roc_{name}.csv"));
    report.write_json(&json)?;
    write_roc_csv(&roc, &report.roc)?;
    Ok((report, json, roc))
}
