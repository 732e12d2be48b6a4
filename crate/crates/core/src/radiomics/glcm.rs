//! Grey level co-occurrence matrices.
//!
//! One symmetric matrix per direction in [`DIRECTIONS`], counting ROI voxel
//! pairs at Chebyshev distance 1. Features are reported twice: averaged over
//! the per-direction matrices and computed on the merged (summed) matrix.
//! Directions without any pair are left out of the average; when no
//! direction has a pair (e.g. a single-voxel ROI) the matrix is replaced by
//! a single self co-occurrence of the lowest grey level present.

use super::roi::{DiscretizedRoi, DIRECTIONS};

pub const GLCM_NAMES: [&str; 25] = [
    "joint_maximum",
    "joint_average",
    "joint_variance",
    "joint_entropy",
    "difference_average",
    "difference_variance",
    "difference_entropy",
    "sum_average",
    "sum_variance",
    "sum_entropy",
    "angular_second_moment",
    "contrast",
    "dissimilarity",
    "inverse_difference",
    "inverse_difference_normalised",
    "inverse_difference_moment",
    "inverse_difference_moment_normalised",
    "inverse_variance",
    "correlation",
    "autocorrelation",
    "cluster_tendency",
    "cluster_shade",
    "cluster_prominence",
    "information_correlation_1",
    "information_correlation_2",
];

/// Dense `Ng x Ng` co-occurrence counts; entry `(i, j)` for grey levels `i+1, j+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoMatrix {
    pub n_levels: usize,
    pub counts: Vec<f64>,
}

impl CoMatrix {
    fn zeros(n_levels: usize) -> Self {
        CoMatrix {
            n_levels,
            counts: vec![0.0; n_levels * n_levels],
        }
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.counts[i * self.n_levels + j]
    }

    fn add(&mut self, other: &CoMatrix) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// Sum-normalized probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        let t = self.total();
        self.counts.iter().map(|c| c / t).collect()
    }
}

/// Per-direction matrices in [`DIRECTIONS`] order.
pub fn cooccurrence_matrices(droi: &DiscretizedRoi) -> Vec<CoMatrix> {
    let ng = droi.n_bins() as usize;
    let g = droi.grid();
    DIRECTIONS
        .iter()
        .map(|d| {
            let mut m = CoMatrix::zeros(ng);
            for (&v, &a) in droi.voxels().iter().zip(droi.bins()) {
                let b = droi.level_at_offset(g.coords(v), *d);
                if b > 0 {
                    let (i, j) = (a as usize - 1, b as usize - 1);
                    m.counts[i * ng + j] += 1.0;
                    m.counts[j * ng + i] += 1.0;
                }
            }
            m
        })
        .collect()
}

fn degenerate(droi: &DiscretizedRoi) -> CoMatrix {
    let ng = droi.n_bins() as usize;
    let mut m = CoMatrix::zeros(ng);
    let g = droi.min_level() as usize - 1;
    m.counts[g * ng + g] = 1.0;
    m
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// The 25 features of one non-empty matrix, in [`GLCM_NAMES`] order.
pub fn glcm_matrix_features(m: &CoMatrix) -> [f64; 25] {
    let ng = m.n_levels;
    let p = m.probabilities();
    let level = |k: usize| (k + 1) as f64;

    let mut px = vec![0.0; ng];
    let mut py = vec![0.0; ng];
    let mut pdiff = vec![0.0; ng];
    let mut psum = vec![0.0; 2 * ng + 1];
    for i in 0..ng {
        for j in 0..ng {
            let v = p[i * ng + j];
            px[i] += v;
            py[j] += v;
            pdiff[i.abs_diff(j)] += v;
            psum[i + j + 2] += v;
        }
    }
    let mu_x: f64 = (0..ng).map(|i| level(i) * px[i]).sum();
    let mu_y: f64 = (0..ng).map(|j| level(j) * py[j]).sum();
    let var_x: f64 = (0..ng).map(|i| (level(i) - mu_x).powi(2) * px[i]).sum();
    let var_y: f64 = (0..ng).map(|j| (level(j) - mu_y).powi(2) * py[j]).sum();

    let mut f = [0.0; 25];
    let (mut jmax, mut jvar, mut jent, mut asm, mut contrast, mut dissim) = (0.0f64, 0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut id, mut idn, mut idm, mut idmn, mut inv_var) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut corr, mut auto, mut ct, mut cs, mut cp, mut hxy1) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let ngf = ng as f64;
    for i in 0..ng {
        for j in 0..ng {
            let v = p[i * ng + j];
            if v == 0.0 {
                continue;
            }
            let (a, b) = (level(i), level(j));
            let d = a - b;
            let ad = d.abs();
            jmax = jmax.max(v);
            jvar += (a - mu_x).powi(2) * v;
            jent -= plogp(v);
            asm += v * v;
            contrast += d * d * v;
            dissim += ad * v;
            id += v / (1.0 + ad);
            idn += v / (1.0 + ad / ngf);
            idm += v / (1.0 + d * d);
            idmn += v / (1.0 + d * d / (ngf * ngf));
            if i != j {
                inv_var += v / (d * d);
            }
            corr += (a - mu_x) * (b - mu_y) * v;
            auto += a * b * v;
            let c = a + b - mu_x - mu_y;
            ct += c * c * v;
            cs += c * c * c * v;
            cp += c * c * c * c * v;
            hxy1 -= v * (px[i] * py[j]).log2();
        }
    }
    let mut hxy2 = 0.0;
    for i in 0..ng {
        for j in 0..ng {
            hxy2 -= plogp(px[i] * py[j]);
        }
    }
    let hx: f64 = -px.iter().map(|&v| plogp(v)).sum::<f64>();
    let hy: f64 = -py.iter().map(|&v| plogp(v)).sum::<f64>();

    let diff_avg: f64 = (0..ng).map(|k| k as f64 * pdiff[k]).sum();
    let diff_var: f64 = (0..ng).map(|k| (k as f64 - diff_avg).powi(2) * pdiff[k]).sum();
    let diff_ent: f64 = -pdiff.iter().map(|&v| plogp(v)).sum::<f64>();
    let sum_avg: f64 = (2..=2 * ng).map(|k| k as f64 * psum[k]).sum();
    let sum_var: f64 = (2..=2 * ng).map(|k| (k as f64 - sum_avg).powi(2) * psum[k]).sum();
    let sum_ent: f64 = -psum.iter().map(|&v| plogp(v)).sum::<f64>();

    let sd = (var_x * var_y).sqrt();
    let hmax = hx.max(hy);
    f[0] = jmax;
    f[1] = mu_x;
    f[2] = jvar;
    f[3] = jent;
    f[4] = diff_avg;
    f[5] = diff_var;
    f[6] = diff_ent;
    f[7] = sum_avg;
    f[8] = sum_var;
    f[9] = sum_ent;
    f[10] = asm;
    f[11] = contrast;
    f[12] = dissim;
    f[13] = id;
    f[14] = idn;
    f[15] = idm;
    f[16] = idmn;
    f[17] = inv_var;
    f[18] = if sd > 0.0 { corr / sd } else { 1.0 };
    f[19] = auto;
    f[20] = ct;
    f[21] = cs;
    f[22] = cp;
    f[23] = if hmax > 0.0 { (jent - hxy1) / hmax } else { 0.0 };
    f[24] = (1.0 - (-2.0 * (hxy2 - jent)).exp()).max(0.0).sqrt();
    f
}

/// `[averaged.., merged..]`, 50 values.
pub fn cooccurrence_features(droi: &DiscretizedRoi) -> [f64; 50] {
    let mats = cooccurrence_matrices(droi);
    let mut merged = CoMatrix::zeros(droi.n_bins() as usize);
    let mut avg = [0.0; 25];
    let mut used = 0usize;
    for m in &mats {
        merged.add(m);
        if m.total() > 0.0 {
            let f = glcm_matrix_features(m);
            for (a, v) in avg.iter_mut().zip(f) {
                *a += v;
            }
            used += 1;
        }
    }
    let (avg, merged_f) = if used == 0 {
        let f = glcm_matrix_features(&degenerate(droi));
        (f, f)
    } else {
        for a in avg.iter_mut() {
            *a /= used as f64;
        }
        (avg, glcm_matrix_features(&merged))
    };
    let mut out = [0.0; 50];
    out[..25].copy_from_slice(&avg);
    out[25..].copy_from_slice(&merged_f);
    out
}
