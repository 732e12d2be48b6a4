//! Grey level run-length matrices over the 13 directions.

use super::emphasis::{emphasis_features, LevelTable};
use super::roi::{DiscretizedRoi, DIRECTIONS};

pub const GLRLM_NAMES: [&str; 16] = [
    "short_runs_emphasis",
    "long_runs_emphasis",
    "low_grey_level_run_emphasis",
    "high_grey_level_run_emphasis",
    "short_run_low_grey_level_emphasis",
    "short_run_high_grey_level_emphasis",
    "long_run_low_grey_level_emphasis",
    "long_run_high_grey_level_emphasis",
    "grey_level_non_uniformity",
    "grey_level_non_uniformity_normalised",
    "run_length_non_uniformity",
    "run_length_non_uniformity_normalised",
    "run_percentage",
    "grey_level_variance",
    "run_length_variance",
    "run_entropy",
];

/// Run-length table for one direction: maximal runs of equal grey level,
/// broken by the ROI boundary.
pub fn run_length_table(droi: &DiscretizedRoi, d: [i64; 3]) -> LevelTable {
    let g = droi.grid();
    let back = [-d[0], -d[1], -d[2]];
    let mut t = LevelTable::default();
    for (&v, &level) in droi.voxels().iter().zip(droi.bins()) {
        let c = g.coords(v);
        if droi.level_at_offset(c, back) == level {
            continue;
        }
        let mut len = 1u32;
        let mut cur = c;
        while let Some(next) = g.offset_index(cur, d) {
            if droi.level_at(next) != level {
                break;
            }
            len += 1;
            cur = g.coords(next);
        }
        t.add(level, len, 1.0);
    }
    t
}

pub fn run_length_tables(droi: &DiscretizedRoi) -> Vec<LevelTable> {
    DIRECTIONS.iter().map(|&d| run_length_table(droi, d)).collect()
}

/// `[averaged.., merged..]`, 32 values. The merged run percentage divides by
/// the voxel count times the number of directions.
pub fn runlength_features(droi: &DiscretizedRoi) -> [f64; 32] {
    let tables = run_length_tables(droi);
    let nv = droi.len() as f64;
    let mut avg = [0.0; 16];
    let mut merged = LevelTable::default();
    for t in &tables {
        for (a, v) in avg.iter_mut().zip(emphasis_features(t, nv)) {
            *a += v;
        }
        merged.merge(t);
    }
    let k = tables.len() as f64;
    let mut out = [0.0; 32];
    for (o, a) in out.iter_mut().zip(avg) {
        *o = a / k;
    }
    out[16..].copy_from_slice(&emphasis_features(&merged, nv * k));
    out
}
