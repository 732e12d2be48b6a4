//! Radiomic feature extraction: 186 features in ten families.
//!
//! Feature IDs have the form `family.name` or, for the co-occurrence and
//! run-length families, `family.name.averaged` / `family.name.merged`. The
//! list returned by [`feature_ids`] is the canonical column order of every
//! feature table.

pub mod emphasis;
pub mod glcm;
pub mod glrlm;
pub mod local;
pub mod neighbourhood;
pub mod roi;
pub mod stats;
pub mod table;
pub mod zones;

use std::sync::OnceLock;

use rayon::prelude::*;

pub use roi::{build_roi, discretize_fbn, DiscretizedRoi, Roi};
pub use table::FeatureTable;
pub use zones::ZoneMetric;

use crate::error::Result;
use crate::volume::{read_mask, read_volume, validate_pair, CaseRecord, Mask, Volume};

pub const DEFAULT_N_BINS: u32 = 32;
pub const N_FEATURES: usize = 186;

/// `(family, feature count)` in canonical order.
pub const FAMILIES: [(&str, usize); 10] = [
    ("local_intensity", 2),
    ("intensity_stats", 18),
    ("intensity_histogram", 23),
    ("ivh", 7),
    ("glcm", 50),
    ("glrlm", 32),
    ("glszm", 16),
    ("gldzm", 16),
    ("ngtdm", 5),
    ("ngldm", 17),
];

fn plain(family: &str, names: &[&str], out: &mut Vec<String>) {
    out.extend(names.iter().map(|n| format!("{family}.{n}")));
}

fn aggregated(family: &str, names: &[&str], out: &mut Vec<String>) {
    for agg in ["averaged", "merged"] {
        out.extend(names.iter().map(|n| format!("{family}.{n}.{agg}")));
    }
}

/// The 186 feature IDs in canonical order.
pub fn feature_ids() -> &'static [String] {
    static IDS: OnceLock<Vec<String>> = OnceLock::new();
    IDS.get_or_init(|| {
        let mut v = Vec::with_capacity(N_FEATURES);
        plain("local_intensity", &local::LOCAL_INTENSITY_NAMES, &mut v);
        plain("intensity_stats", &stats::INTENSITY_STATS_NAMES, &mut v);
        plain("intensity_histogram", &stats::INTENSITY_HISTOGRAM_NAMES, &mut v);
        plain("ivh", &stats::IVH_NAMES, &mut v);
        aggregated("glcm", &glcm::GLCM_NAMES, &mut v);
        aggregated("glrlm", &glrlm::GLRLM_NAMES, &mut v);
        plain("glszm", &zones::GLSZM_NAMES, &mut v);
        plain("gldzm", &zones::GLDZM_NAMES, &mut v);
        plain("ngtdm", &neighbourhood::NGTDM_NAMES, &mut v);
        plain("ngldm", &neighbourhood::NGLDM_NAMES, &mut v);
        v
    })
}

/// Family of a feature ID (the part before the first dot).
pub fn family_of(id: &str) -> &str {
    id.split('.').next().unwrap_or(id)
}

/// 186 values aligned with [`feature_ids`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn ids(&self) -> &'static [String] {
        feature_ids()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        feature_ids().iter().map(String::as_str).zip(self.values.iter().copied())
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        feature_ids().iter().position(|f| f == id).map(|i| self.values[i])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// All families for one volume/mask pair.
pub fn extract_all(v: &Volume, m: &Mask, n_bins: u32) -> Result<FeatureVector> {
    validate_pair(v, m)?;
    let roi = build_roi(v, m)?;
    let droi = discretize_fbn(&roi, n_bins)?;
    let mut values = Vec::with_capacity(N_FEATURES);
    values.extend(local::local_intensity_features(v, &roi));
    values.extend(stats::intensity_stats_features(&roi));
    values.extend(stats::intensity_histogram_features(&droi));
    values.extend(stats::ivh_features(&droi));
    values.extend(glcm::cooccurrence_features(&droi));
    values.extend(glrlm::runlength_features(&droi));
    values.extend(zones::zone_features(&droi, ZoneMetric::Size));
    values.extend(zones::zone_features(&droi, ZoneMetric::Distance));
    values.extend(neighbourhood::neighbourhood_features(&droi));
    debug_assert_eq!(values.len(), N_FEATURES);
    Ok(FeatureVector { values })
}

/// Read and extract every case of a manifest, in parallel across cases.
/// Rows follow manifest order.
pub fn extract_cohort(records: &[CaseRecord], n_bins: u32) -> Result<FeatureTable> {
    let rows = records
        .par_iter()
        .map(|r| {
            let v = read_volume(&r.volume_path)?;
            let m = read_mask(&r.mask_path)?;
            extract_all(&v, &m, n_bins).map(FeatureVector::into_values)
        })
        .collect::<Result<Vec<_>>>()?;
    let case_ids = records.iter().map(|r| r.case_id.clone()).collect();
    FeatureTable::new(case_ids, feature_ids().to_vec(), rows)
}

/// Feature table of in-memory `(case_id, volume, mask)` triples, in input order.
pub fn extract_cohort_cases(cases: &[(String, &Volume, &Mask)], n_bins: u32) -> Result<FeatureTable> {
    let rows = cases
        .par_iter()
        .map(|(_, v, m)| extract_all(v, m, n_bins).map(FeatureVector::into_values))
        .collect::<Result<Vec<_>>>()?;
    let case_ids = cases.iter().map(|c| c.0.clone()).collect();
    FeatureTable::new(case_ids, feature_ids().to_vec(), rows)
}
