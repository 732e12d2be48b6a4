//! Neighbourhood grey-tone difference and grey-level dependence matrices,
//! both over the 26-neighbourhood.

use super::emphasis::{emphasis_features, LevelTable};
use super::roi::{neighbour_offsets, DiscretizedRoi};

pub const NGTDM_NAMES: [&str; 5] = ["coarseness", "contrast", "busyness", "complexity", "strength"];

pub const NGLDM_NAMES: [&str; 17] = [
    "low_dependence_emphasis",
    "high_dependence_emphasis",
    "low_grey_level_count_emphasis",
    "high_grey_level_count_emphasis",
    "low_dependence_low_grey_level_emphasis",
    "low_dependence_high_grey_level_emphasis",
    "high_dependence_low_grey_level_emphasis",
    "high_dependence_high_grey_level_emphasis",
    "grey_level_non_uniformity",
    "grey_level_non_uniformity_normalised",
    "dependence_count_non_uniformity",
    "dependence_count_non_uniformity_normalised",
    "dependence_count_percentage",
    "grey_level_variance",
    "dependence_count_variance",
    "dependence_count_entropy",
    "dependence_count_energy",
];

/// Coarseness when every voxel matches its neighbourhood mean.
pub const COARSENESS_CAP: f64 = 1e6;

/// NGTDM columns: per grey level `i` (index `i - 1`), the number of voxels
/// `n_i` with at least one in-ROI neighbour and `s_i = Σ |i - mean of neighbours|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToneTable {
    pub n: Vec<f64>,
    pub s: Vec<f64>,
}

pub fn tone_table(droi: &DiscretizedRoi) -> ToneTable {
    let ng = droi.n_bins() as usize;
    let g = droi.grid();
    let offsets = neighbour_offsets();
    let mut t = ToneTable {
        n: vec![0.0; ng],
        s: vec![0.0; ng],
    };
    for (&v, &level) in droi.voxels().iter().zip(droi.bins()) {
        let c = g.coords(v);
        let (mut sum, mut k) = (0.0, 0usize);
        for &d in &offsets {
            let l = droi.level_at_offset(c, d);
            if l > 0 {
                sum += l as f64;
                k += 1;
            }
        }
        if k > 0 {
            let i = level as usize - 1;
            t.n[i] += 1.0;
            t.s[i] += (level as f64 - sum / k as f64).abs();
        }
    }
    t
}

pub fn ngtdm_features(t: &ToneTable) -> [f64; 5] {
    let nvc: f64 = t.n.iter().sum();
    if nvc == 0.0 {
        return [COARSENESS_CAP, 0.0, 0.0, 0.0, 0.0];
    }
    let p: Vec<f64> = t.n.iter().map(|n| n / nvc).collect();
    let present: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0).collect();
    let ngp = present.len() as f64;
    let s_total: f64 = t.s.iter().sum();
    let ps: f64 = present.iter().map(|&i| p[i] * t.s[i]).sum();

    let coarseness = if ps > 0.0 { 1.0 / ps } else { COARSENESS_CAP };
    let (mut c_sum, mut busy_den, mut complexity, mut strength_num) = (0.0, 0.0, 0.0, 0.0);
    for &i in &present {
        for &j in &present {
            let (a, b) = ((i + 1) as f64, (j + 1) as f64);
            let d2 = (a - b).powi(2);
            c_sum += p[i] * p[j] * d2;
            busy_den += (a * p[i] - b * p[j]).abs();
            complexity += (a - b).abs() * (p[i] * t.s[i] + p[j] * t.s[j]) / (p[i] + p[j]);
            strength_num += (p[i] + p[j]) * d2;
        }
    }
    let contrast = if ngp > 1.0 {
        c_sum / (ngp * (ngp - 1.0)) * s_total / nvc
    } else {
        0.0
    };
    let busyness = if busy_den > 0.0 { ps / busy_den } else { 0.0 };
    let strength = if s_total > 0.0 { strength_num / s_total } else { 0.0 };
    [coarseness, contrast, busyness, complexity / nvc, strength]
}

/// Dependence table: each ROI voxel contributes one count at
/// `(level, 1 + number of equal-level in-ROI neighbours)`.
pub fn dependence_table(droi: &DiscretizedRoi) -> LevelTable {
    let g = droi.grid();
    let offsets = neighbour_offsets();
    let mut t = LevelTable::default();
    for (&v, &level) in droi.voxels().iter().zip(droi.bins()) {
        let c = g.coords(v);
        let k = offsets.iter().filter(|&&d| droi.level_at_offset(c, d) == level).count();
        t.add(level, k as u32 + 1, 1.0);
    }
    t
}

pub fn ngldm_features(droi: &DiscretizedRoi) -> [f64; 17] {
    let t = dependence_table(droi);
    let ns = t.total();
    let mut out = [0.0; 17];
    out[..16].copy_from_slice(&emphasis_features(&t, droi.len() as f64));
    out[16] = t.entries.values().map(|c| (c / ns).powi(2)).sum();
    out
}

/// `[ngtdm (5).., ngldm (17)..]`.
pub fn neighbourhood_features(droi: &DiscretizedRoi) -> [f64; 22] {
    let mut out = [0.0; 22];
    out[..5].copy_from_slice(&ngtdm_features(&tone_table(droi)));
    out[5..].copy_from_slice(&ngldm_features(droi));
    out
}
