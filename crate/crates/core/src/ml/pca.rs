//! Principal component analysis on min-max scaled, centred columns.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How many components to keep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Retain {
    /// Smallest count whose cumulative explained ratio reaches the target.
    Variance(f64),
    /// Fixed count, capped at the available rank.
    Components(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PcaConfig {
    pub retain: Retain,
    /// Min-max scale columns to `[0, 1]` before centring.
    pub min_max_scale: bool,
}

impl Default for PcaConfig {
    fn default() -> Self {
        PcaConfig {
            retain: Retain::Variance(0.95),
            min_max_scale: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mins: Vec<f64>,
    /// Column ranges; 0 for constant columns, which scale to 0.
    pub ranges: Vec<f64>,
    /// Means of the scaled columns.
    pub means: Vec<f64>,
    /// `k` components of length `p`, orthonormal.
    pub components: Vec<Vec<f64>>,
    pub explained_variance_ratio: Vec<f64>,
}

fn check_rows(x: &[Vec<f64>], p: usize) -> Result<()> {
    if let Some(r) = x.iter().find(|r| r.len() != p) {
        return Err(Error::LengthMismatch(p, r.len()));
    }
    Ok(())
}

pub fn pca_fit(x: &[Vec<f64>], cfg: &PcaConfig) -> Result<PcaModel> {
    let n = x.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let p = x[0].len();
    if p == 0 {
        return Err(Error::InvalidParameter("no feature columns".into()));
    }
    check_rows(x, p)?;
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite value in PCA input".into()));
    }

    let (mut mins, mut ranges) = (vec![0.0; p], vec![1.0; p]);
    if cfg.min_max_scale {
        for j in 0..p {
            let (lo, hi) = x
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r[j]), hi.max(r[j])));
            mins[j] = lo;
            ranges[j] = hi - lo;
        }
    }
    let scale = |j: usize, v: f64| if ranges[j] > 0.0 { (v - mins[j]) / ranges[j] } else { 0.0 };
    let scaled = DMatrix::from_fn(n, p, |i, j| scale(j, x[i][j]));
    let means: Vec<f64> = (0..p).map(|j| scaled.column(j).mean()).collect();
    let centred = DMatrix::from_fn(n, p, |i, j| scaled[(i, j)] - means[j]);

    let svd = centred.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    let var: Vec<f64> = order.iter().map(|&i| svd.singular_values[i].powi(2)).collect();
    let total: f64 = var.iter().sum();
    let ratios: Vec<f64> = var
        .iter()
        .map(|v| if total > 0.0 { v / total } else { 0.0 })
        .collect();

    let k = match cfg.retain {
        Retain::Components(c) => c.clamp(1, order.len()),
        Retain::Variance(target) => {
            if !(target > 0.0 && target <= 1.0) {
                return Err(Error::InvalidParameter(format!("variance target {target} outside (0, 1]")));
            }
            let mut cum = 0.0;
            let mut k = order.len();
            for (i, r) in ratios.iter().enumerate() {
                cum += r;
                if cum >= target - 1e-12 {
                    k = i + 1;
                    break;
                }
            }
            if total == 0.0 {
                1
            } else {
                k
            }
        }
    };

    let components = order[..k]
        .iter()
        .map(|&i| {
            let mut c: Vec<f64> = v_t.row(i).iter().copied().collect();
            let lead = c
                .iter()
                .copied()
                .enumerate()
                .fold((0, 0.0f64), |best, (j, v)| if v.abs() > best.1.abs() { (j, v) } else { best })
                .0;
            if c[lead] < 0.0 {
                c.iter_mut().for_each(|v| *v = -*v);
            }
            c
        })
        .collect();
    Ok(PcaModel {
        mins,
        ranges,
        means,
        components,
        explained_variance_ratio: ratios[..k].to_vec(),
    })
}

impl PcaModel {
    pub fn n_features(&self) -> usize {
        self.means.len()
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    fn centred(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &v)| {
                let s = if self.ranges[j] > 0.0 {
                    (v - self.mins[j]) / self.ranges[j]
                } else {
                    0.0
                };
                s - self.means[j]
            })
            .collect()
    }

    pub fn transform(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        check_rows(x, self.n_features())?;
        Ok(x.iter()
            .map(|r| {
                let c = self.centred(r);
                self.components
                    .iter()
                    .map(|comp| comp.iter().zip(&c).map(|(a, b)| a * b).sum())
                    .collect()
            })
            .collect())
    }

    /// Back to the original column units.
    pub fn inverse_transform(&self, scores: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        check_rows(scores, self.n_components())?;
        Ok(scores
            .iter()
            .map(|s| {
                (0..self.n_features())
                    .map(|j| {
                        let c: f64 = self.components.iter().zip(s).map(|(comp, v)| comp[j] * v).sum();
                        let scaled = c + self.means[j];
                        if self.ranges[j] > 0.0 {
                            scaled * self.ranges[j] + self.mins[j]
                        } else {
                            self.mins[j]
                        }
                    })
                    .collect()
            })
            .collect())
    }
}
