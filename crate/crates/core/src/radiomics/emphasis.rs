//! Shared feature set of the run-length and zone matrices.
//!
//! GLRLM, GLSZM and GLDZM all tabulate counts `r(i, j)` of grey level `i`
//! against a length-like index `j` (run length, zone size, zone distance)
//! and derive the same 16 quantities from them.

use std::collections::BTreeMap;

/// Sparse `(grey level, j) -> count` table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LevelTable {
    pub entries: BTreeMap<(u32, u32), f64>,
}

impl LevelTable {
    pub fn add(&mut self, level: u32, j: u32, count: f64) {
        *self.entries.entry((level, j)).or_insert(0.0) += count;
    }

    pub fn merge(&mut self, other: &LevelTable) {
        for (&(i, j), &c) in &other.entries {
            self.add(i, j, c);
        }
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Feature order shared by all three families; index 12 is the
/// run/zone percentage `N_s / N_v`.
pub fn emphasis_features(t: &LevelTable, n_voxels: f64) -> [f64; 16] {
    let ns = t.total();
    let mut row: BTreeMap<u32, f64> = BTreeMap::new();
    let mut col: BTreeMap<u32, f64> = BTreeMap::new();
    let mut f = [0.0; 16];
    let (mut mu_i, mut mu_j) = (0.0, 0.0);
    for (&(i, j), &c) in &t.entries {
        let (a, b) = (i as f64, j as f64);
        let (a2, b2) = (a * a, b * b);
        f[0] += c / b2;
        f[1] += c * b2;
        f[2] += c / a2;
        f[3] += c * a2;
        f[4] += c / (a2 * b2);
        f[5] += c * a2 / b2;
        f[6] += c * b2 / a2;
        f[7] += c * a2 * b2;
        *row.entry(i).or_insert(0.0) += c;
        *col.entry(j).or_insert(0.0) += c;
        mu_i += a * c / ns;
        mu_j += b * c / ns;
    }
    for v in f.iter_mut().take(8) {
        *v /= ns;
    }
    let gl_nu: f64 = row.values().map(|r| r * r).sum();
    let j_nu: f64 = col.values().map(|r| r * r).sum();
    f[8] = gl_nu / ns;
    f[9] = gl_nu / (ns * ns);
    f[10] = j_nu / ns;
    f[11] = j_nu / (ns * ns);
    f[12] = ns / n_voxels;
    let (mut var_i, mut var_j, mut ent) = (0.0, 0.0, 0.0);
    for (&(i, j), &c) in &t.entries {
        let p = c / ns;
        var_i += (i as f64 - mu_i).powi(2) * p;
        var_j += (j as f64 - mu_j).powi(2) * p;
        ent -= p * p.log2();
    }
    f[13] = var_i;
    f[14] = var_j;
    f[15] = ent;
    f
}
