//! Local and global intensity peaks.
//!
//! The peak is the mean intensity inside a 1 cm³ sphere (radius
//! `(3 / 4π)^(1/3)` cm ≈ 6.2 mm) around a voxel. Sphere membership is by
//! voxel-centre distance in millimetres; the sphere may leave the ROI but
//! positions outside the volume are dropped from the mean.

use rayon::prelude::*;

use super::roi::Roi;
use crate::volume::{HasGrid, Volume};

pub const LOCAL_INTENSITY_NAMES: [&str; 2] = ["local_intensity_peak", "global_intensity_peak"];

/// Radius of a 1 cm³ sphere, in millimetres.
pub fn sphere_radius_mm() -> f64 {
    (3.0 / (4.0 * std::f64::consts::PI)).cbrt() * 10.0
}

/// Integer voxel offsets whose centres lie within the sphere.
pub fn sphere_offsets(spacing_mm: [f64; 3]) -> Vec<[i64; 3]> {
    let r = sphere_radius_mm();
    let reach: Vec<i64> = spacing_mm.iter().map(|s| (r / s).floor() as i64).collect();
    let mut out = Vec::new();
    for dz in -reach[2]..=reach[2] {
        for dy in -reach[1]..=reach[1] {
            for dx in -reach[0]..=reach[0] {
                let d2 = (dx as f64 * spacing_mm[0]).powi(2)
                    + (dy as f64 * spacing_mm[1]).powi(2)
                    + (dz as f64 * spacing_mm[2]).powi(2);
                if d2 <= r * r {
                    out.push([dx, dy, dz]);
                }
            }
        }
    }
    out
}

fn sphere_mean(v: &Volume, offsets: &[[i64; 3]], centre: usize) -> f64 {
    let g = v.grid();
    let c = g.coords(centre);
    let (mut sum, mut n) = (0.0, 0usize);
    for d in offsets {
        if let Some(i) = g.offset_index(c, *d) {
            sum += v.voxels()[i] as f64;
            n += 1;
        }
    }
    sum / n as f64
}

pub fn local_intensity_features(v: &Volume, roi: &Roi<'_>) -> [f64; 2] {
    let offsets = sphere_offsets(v.spacing_mm());
    let max = roi
        .intensities()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let local = roi
        .voxels()
        .iter()
        .zip(roi.intensities())
        .filter(|(_, &x)| x == max)
        .map(|(&i, _)| sphere_mean(v, &offsets, i))
        .fold(f64::NEG_INFINITY, f64::max);
    let global = roi
        .voxels()
        .par_iter()
        .map(|&i| sphere_mean(v, &offsets, i))
        .reduce(|| f64::NEG_INFINITY, f64::max);
    [local, global]
}
