//! Intensity normalization and geometric standardization.
//!
//! World coordinates follow the voxel-centre convention: the centre of voxel
//! `i` along an axis sits at `origin + (i + 0.5) * spacing`, so `origin` is
//! the outer corner of the grid. Resampling keeps the origin and samples the
//! input at each output voxel centre.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::{Grid, HasGrid, Mask, Volume};

/// Per-volume min-max map onto `[0, 1]`. A constant volume maps to all zeros.
pub fn minmax_normalize(v: &Volume) -> Volume {
    let (lo, hi) = v.min_max();
    let (lo, hi) = (lo as f64, hi as f64);
    let range = hi - lo;
    let voxels = if range > 0.0 {
        v.voxels().iter().map(|&x| ((x as f64 - lo) / range) as f32).collect()
    } else {
        vec![0.0; v.voxels().len()]
    };
    v.map_voxels(voxels)
        .expect("normalized voxels are finite")
        .with_unit("normalized")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CropSpec {
    pub center_voxel: [i64; 3],
    pub out_dims: [usize; 3],
}

impl CropSpec {
    /// Lower corner of the crop box: `center - out_dims / 2`.
    pub fn corner(&self) -> [i64; 3] {
        let mut c = [0i64; 3];
        for a in 0..3 {
            c[a] = self.center_voxel[a] - (self.out_dims[a] / 2) as i64;
        }
        c
    }

    fn checked_corner(&self, dims: [usize; 3]) -> Result<[usize; 3]> {
        if self.out_dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParameter(format!("crop dims must be >= 1, got {:?}", self.out_dims)));
        }
        let corner = self.corner();
        let inside = (0..3).all(|a| corner[a] >= 0 && corner[a] as usize + self.out_dims[a] <= dims[a]);
        if !inside {
            return Err(Error::CropOutOfBounds {
                corner,
                size: self.out_dims,
                dims,
            });
        }
        Ok([corner[0] as usize, corner[1] as usize, corner[2] as usize])
    }
}

fn crop_grid(grid: &Grid, spec: &CropSpec) -> Result<(Grid, [usize; 3])> {
    let corner = spec.checked_corner(grid.dims)?;
    let mut origin = grid.origin_mm;
    for a in 0..3 {
        origin[a] += corner[a] as f64 * grid.spacing_mm[a];
    }
    Ok((Grid::new(spec.out_dims, grid.spacing_mm, origin)?, corner))
}

fn crop_samples<T: Copy>(src: &[T], grid: &Grid, out: &Grid, corner: [usize; 3]) -> Vec<T> {
    let [ox, oy, oz] = out.dims;
    let mut dst = Vec::with_capacity(out.len());
    for z in 0..oz {
        for y in 0..oy {
            let row = grid.index(corner[0], corner[1] + y, corner[2] + z);
            dst.extend_from_slice(&src[row..row + ox]);
        }
    }
    dst
}

/// Extract the box of `spec.out_dims` voxels centred on `spec.center_voxel`.
/// No padding: the box must lie inside the volume.
pub fn crop(v: &Volume, spec: &CropSpec) -> Result<Volume> {
    let (out, corner) = crop_grid(v.grid(), spec)?;
    let voxels = crop_samples(v.voxels(), v.grid(), &out, corner);
    Ok(Volume::new(out, voxels)?.with_unit(v.intensity_unit()))
}

pub fn crop_mask(m: &Mask, spec: &CropSpec) -> Result<Mask> {
    let (out, corner) = crop_grid(m.grid(), spec)?;
    let labels = crop_samples(m.labels(), m.grid(), &out, corner);
    Mask::new(out, labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    Trilinear,
    Nearest,
}

/// Continuous input index sampled by output voxel `i`, clamped to the input extent.
#[inline]
fn source_coord(i: usize, out_spacing: f64, in_spacing: f64, n_in: usize) -> f64 {
    let u = (i as f64 + 0.5) * out_spacing / in_spacing - 0.5;
    u.clamp(0.0, (n_in - 1) as f64)
}

/// Per-axis lookup: lower index, upper index, weight of the upper sample.
fn axis_taps(n_out: usize, out_spacing: f64, in_spacing: f64, n_in: usize) -> Vec<(usize, usize, f64)> {
    (0..n_out)
        .map(|i| {
            let u = source_coord(i, out_spacing, in_spacing, n_in);
            let lo = (u.floor() as usize).min(n_in - 1);
            let hi = (lo + 1).min(n_in - 1);
            (lo, hi, u - lo as f64)
        })
        .collect()
}

fn nearest_taps(n_out: usize, out_spacing: f64, in_spacing: f64, n_in: usize) -> Vec<usize> {
    (0..n_out)
        .map(|i| {
            let u = source_coord(i, out_spacing, in_spacing, n_in);
            ((u + 0.5).floor() as usize).min(n_in - 1)
        })
        .collect()
}

fn check_target(out_dims: [usize; 3], out_spacing: [f64; 3]) -> Result<()> {
    if out_dims.iter().any(|&d| d == 0) || out_spacing.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "resample target must be positive, got dims {out_dims:?} spacing {out_spacing:?}"
        )));
    }
    Ok(())
}

/// Resample onto a grid with the same origin and the given dims/spacing.
pub fn resample(v: &Volume, out_dims: [usize; 3], out_spacing: [f64; 3], mode: Interpolation) -> Result<Volume> {
    check_target(out_dims, out_spacing)?;
    let g = v.grid();
    let out = Grid::new(out_dims, out_spacing, g.origin_mm)?;
    let src = v.voxels();
    let mut dst = Vec::with_capacity(out.len());
    match mode {
        Interpolation::Nearest => {
            let t: Vec<Vec<usize>> = (0..3)
                .map(|a| nearest_taps(out_dims[a], out_spacing[a], g.spacing_mm[a], g.dims[a]))
                .collect();
            for &z in &t[2] {
                for &y in &t[1] {
                    for &x in &t[0] {
                        dst.push(src[g.index(x, y, z)]);
                    }
                }
            }
        }
        Interpolation::Trilinear => {
            let t: Vec<Vec<(usize, usize, f64)>> = (0..3)
                .map(|a| axis_taps(out_dims[a], out_spacing[a], g.spacing_mm[a], g.dims[a]))
                .collect();
            for &(z0, z1, wz) in &t[2] {
                for &(y0, y1, wy) in &t[1] {
                    for &(x0, x1, wx) in &t[0] {
                        let s = |x: usize, y: usize, z: usize| src[g.index(x, y, z)] as f64;
                        let corners = [
                            s(x0, y0, z0),
                            s(x1, y0, z0),
                            s(x0, y1, z0),
                            s(x1, y1, z0),
                            s(x0, y0, z1),
                            s(x1, y0, z1),
                            s(x0, y1, z1),
                            s(x1, y1, z1),
                        ];
                        let lerp = |a: f64, b: f64, w: f64| a + w * (b - a);
                        let c00 = lerp(corners[0], corners[1], wx);
                        let c10 = lerp(corners[2], corners[3], wx);
                        let c01 = lerp(corners[4], corners[5], wx);
                        let c11 = lerp(corners[6], corners[7], wx);
                        let value = lerp(lerp(c00, c10, wy), lerp(c01, c11, wy), wz);
                        let lo = corners.iter().copied().fold(f64::INFINITY, f64::min);
                        let hi = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        dst.push(value.clamp(lo, hi) as f32);
                    }
                }
            }
        }
    }
    Ok(Volume::new(out, dst)?.with_unit(v.intensity_unit()))
}

/// Nearest-neighbour resampling of a mask; labels stay in `{0, 1}`.
pub fn resample_mask(m: &Mask, out_dims: [usize; 3], out_spacing: [f64; 3]) -> Result<Mask> {
    check_target(out_dims, out_spacing)?;
    let g = m.grid();
    let out = Grid::new(out_dims, out_spacing, g.origin_mm)?;
    let t: Vec<Vec<usize>> = (0..3)
        .map(|a| nearest_taps(out_dims[a], out_spacing[a], g.spacing_mm[a], g.dims[a]))
        .collect();
    let mut labels = Vec::with_capacity(out.len());
    for &z in &t[2] {
        for &y in &t[1] {
            for &x in &t[0] {
                labels.push(m.labels()[g.index(x, y, z)]);
            }
        }
    }
    Mask::new(out, labels)
}

/// Spacing that keeps the field of view of `grid` when resampled to `out_dims`.
pub fn spacing_for_dims(grid: &Grid, out_dims: [usize; 3]) -> [f64; 3] {
    let mut s = [0.0; 3];
    for a in 0..3 {
        s[a] = grid.dims[a] as f64 * grid.spacing_mm[a] / out_dims[a] as f64;
    }
    s
}
