//! Shared helpers for the integration tests.

#![allow(dead_code)]

pub mod oracle;
pub mod schema;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use radfid::{Grid, Mask, Volume};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random ROI of at most `max_side`³ voxels. Intensities are drawn from a
/// few levels so ties, equal-level zones and runs occur often.
pub fn random_case(seed: u64, max_side: usize) -> (oracle::Case, u32) {
    let mut r = rng(seed);
    let dims = [r.random_range(1..=max_side), r.random_range(1..=max_side), r.random_range(1..=max_side)];
    let spacing = [r.random_range(1..=4) as f64, r.random_range(1..=4) as f64, r.random_range(1..=6) as f64];
    let n = dims.iter().product::<usize>();
    let distinct = r.random_range(1..=12);
    let fill = r.random_range(0.3..=1.0);
    let values: Vec<f64> = (0..n)
        .map(|_| (r.random_range(0..distinct) as f32 / distinct as f32 + 0.1) as f64)
        .collect();
    let mut mask: Vec<bool> = (0..n).map(|_| r.random_bool(fill)).collect();
    if !mask.iter().any(|&m| m) {
        mask[r.random_range(0..n)] = true;
    }
    let ng = [2, 3, 4, 8, 16, 32][r.random_range(0..6)];
    (oracle::Case { dims, spacing, values, mask }, ng)
}

pub fn to_pair(c: &oracle::Case) -> (Volume, Mask) {
    let g = Grid::new(c.dims, c.spacing, [0.0; 3]).unwrap();
    let v = Volume::new(g.clone(), c.values.iter().map(|&x| x as f32).collect()).unwrap();
    let m = Mask::new(g, c.mask.iter().map(|&b| u8::from(b)).collect()).unwrap();
    (v, m)
}

/// `|a - b| <= abs` or `|a - b| <= rel * max(|a|, |b|)`; equal infinities pass.
pub fn close(a: f64, b: f64, abs: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= abs || (a - b).abs() <= rel * a.abs().max(b.abs())
}

pub fn random_volume(dims: [usize; 3], r: &mut ChaCha8Rng) -> Volume {
    let g = Grid::unit(dims).unwrap();
    Volume::new(g, (0..dims.iter().product()).map(|_| r.random::<f32>()).collect()).unwrap()
}
