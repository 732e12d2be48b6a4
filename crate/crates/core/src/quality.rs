//! Volume-pair quality metrics: MAE, MSE, PSNR and volumetric SSIM.
//!
//! SSIM is computed in 3D: Gaussian-weighted local statistics (separable
//! window, border samples replicated by clamping) are evaluated at every
//! voxel and the local SSIM map is averaged over the whole volume.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::{validate_pair, Volume};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SsimConfig {
    pub window_radius: usize,
    pub gaussian_sigma: f64,
    pub c1_coeff: f64,
    pub c2_coeff: f64,
    pub data_range: f64,
}

impl Default for SsimConfig {
    fn default() -> Self {
        SsimConfig {
            window_radius: 3,
            gaussian_sigma: 1.5,
            c1_coeff: 0.01,
            c2_coeff: 0.03,
            data_range: 1.0,
        }
    }
}

impl SsimConfig {
    pub fn c1(&self) -> f64 {
        (self.c1_coeff * self.data_range).powi(2)
    }

    pub fn c2(&self) -> f64 {
        (self.c2_coeff * self.data_range).powi(2)
    }

    pub fn window_width(&self) -> usize {
        2 * self.window_radius + 1
    }

    /// Normalized 1D Gaussian taps for offsets `-r..=r`.
    pub fn taps(&self) -> Vec<f64> {
        let r = self.window_radius as i64;
        let s2 = 2.0 * self.gaussian_sigma * self.gaussian_sigma;
        let raw: Vec<f64> = (-r..=r).map(|o| (-((o * o) as f64) / s2).exp()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.window_radius >= 1
            && self.gaussian_sigma > 0.0
            && self.data_range > 0.0
            && self.c1() > 0.0
            && self.c2() > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid SSIM configuration {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub mae: f64,
    pub mse: f64,
    pub psnr_db: f64,
    pub ssim: f64,
    pub data_range: f64,
}

fn warn_out_of_unit_range(v: &Volume) {
    let (lo, hi) = v.min_max();
    if lo < 0.0 || hi > 1.0 {
        log::warn!("volume intensities span [{lo}, {hi}], outside the normalized [0, 1] range");
    }
}

fn paired<'a>(a: &'a Volume, b: &'a Volume) -> Result<impl Iterator<Item = f64> + 'a> {
    validate_pair(a, b)?;
    warn_out_of_unit_range(a);
    warn_out_of_unit_range(b);
    Ok(a.voxels()
        .iter()
        .zip(b.voxels())
        .map(|(&x, &y)| x as f64 - y as f64))
}

pub fn mae(a: &Volume, b: &Volume) -> Result<f64> {
    let n = a.voxels().len() as f64;
    Ok(paired(a, b)?.map(f64::abs).sum::<f64>() / n)
}

pub fn mse(a: &Volume, b: &Volume) -> Result<f64> {
    let n = a.voxels().len() as f64;
    Ok(paired(a, b)?.map(|d| d * d).sum::<f64>() / n)
}

/// `10 log10(L^2 / mse)`; `+inf` when `mse == 0`.
pub fn psnr_from_mse(mse: f64, data_range: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (data_range * data_range / mse).log10()
    }
}

pub fn psnr(a: &Volume, b: &Volume, data_range: f64) -> Result<f64> {
    if !(data_range > 0.0) {
        return Err(Error::InvalidParameter(format!("data_range must be > 0, got {data_range}")));
    }
    Ok(psnr_from_mse(mse(a, b)?, data_range))
}

/// Separable clamped convolution of a field along one axis.
fn blur_axis(src: &[f64], dims: [usize; 3], axis: usize, taps: &[f64]) -> Vec<f64> {
    let [nx, ny, _] = dims;
    let r = (taps.len() / 2) as i64;
    let n = dims[axis] as i64;
    let stride = match axis {
        0 => 1,
        1 => nx,
        _ => nx * ny,
    };
    let mut dst = vec![0.0; src.len()];
    dst.par_chunks_mut(nx * ny).enumerate().for_each(|(z, slab)| {
        for y in 0..ny {
            for x in 0..nx {
                let pos = [x, y, z][axis] as i64;
                let base = x + nx * (y + ny * z) - pos as usize * stride;
                let mut acc = 0.0;
                for (k, w) in taps.iter().enumerate() {
                    let p = (pos + k as i64 - r).clamp(0, n - 1) as usize;
                    acc += w * src[base + p * stride];
                }
                slab[x + nx * y] = acc;
            }
        }
    });
    dst
}

fn gaussian_filter(src: Vec<f64>, dims: [usize; 3], taps: &[f64]) -> Vec<f64> {
    let f = blur_axis(&src, dims, 0, taps);
    let f = blur_axis(&f, dims, 1, taps);
    blur_axis(&f, dims, 2, taps)
}

/// Local SSIM from weighted moments.
#[inline]
pub fn ssim_from_moments(mu_a: f64, mu_b: f64, var_a: f64, var_b: f64, cov: f64, c1: f64, c2: f64) -> f64 {
    ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2))
}

/// Mean local SSIM over every voxel of the pair.
pub fn ssim3d(a: &Volume, b: &Volume, cfg: &SsimConfig) -> Result<f64> {
    validate_pair(a, b)?;
    cfg.validate()?;
    let dims = a.dims();
    let w = cfg.window_width();
    if dims.iter().any(|&d| d < w) {
        return Err(Error::WindowTooLarge { dims, window: w });
    }
    let taps = cfg.taps();
    let xa: Vec<f64> = a.voxels().iter().map(|&v| v as f64).collect();
    let xb: Vec<f64> = b.voxels().iter().map(|&v| v as f64).collect();
    let aa: Vec<f64> = xa.iter().map(|v| v * v).collect();
    let bb: Vec<f64> = xb.iter().map(|v| v * v).collect();
    let ab: Vec<f64> = xa.iter().zip(&xb).map(|(p, q)| p * q).collect();
    let mu_a = gaussian_filter(xa, dims, &taps);
    let mu_b = gaussian_filter(xb, dims, &taps);
    let e_aa = gaussian_filter(aa, dims, &taps);
    let e_bb = gaussian_filter(bb, dims, &taps);
    let e_ab = gaussian_filter(ab, dims, &taps);
    let (c1, c2) = (cfg.c1(), cfg.c2());
    let slab = dims[0] * dims[1];
    // per-slab partial sums, reduced in slab order so the result does not depend on thread count
    let partial: Vec<f64> = (0..dims[2])
        .into_par_iter()
        .map(|z| {
            (z * slab..(z + 1) * slab)
                .map(|i| {
                    let (ma, mb) = (mu_a[i], mu_b[i]);
                    ssim_from_moments(ma, mb, e_aa[i] - ma * ma, e_bb[i] - mb * mb, e_ab[i] - ma * mb, c1, c2)
                })
                .sum::<f64>()
        })
        .collect();
    let total: f64 = partial.iter().sum();
    Ok((total / a.voxels().len() as f64).clamp(-1.0, 1.0))
}

pub fn quality_report(a: &Volume, b: &Volume, cfg: &SsimConfig) -> Result<QualityReport> {
    let mse_v = mse(a, b)?;
    Ok(QualityReport {
        mae: mae(a, b)?,
        mse: mse_v,
        psnr_db: psnr_from_mse(mse_v, cfg.data_range),
        ssim: ssim3d(a, b, cfg)?,
        data_range: cfg.data_range,
    })
}
