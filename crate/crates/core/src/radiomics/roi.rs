use crate::error::{Error, Result};
use crate::volume::{validate_pair, Grid, HasGrid, Mask, Volume};

/// The 13 unique 3D directions at Chebyshev distance 1, in canonical order.
pub const DIRECTIONS: [[i64; 3]; 13] = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 1, 0],
    [1, -1, 0],
    [1, 0, 1],
    [1, 0, -1],
    [0, 1, 1],
    [0, 1, -1],
    [1, 1, 1],
    [1, 1, -1],
    [1, -1, 1],
    [1, -1, -1],
];

/// All 26 neighbour offsets (each direction and its opposite).
pub fn neighbour_offsets() -> [[i64; 3]; 26] {
    let mut out = [[0i64; 3]; 26];
    for (k, d) in DIRECTIONS.iter().enumerate() {
        out[2 * k] = *d;
        out[2 * k + 1] = [-d[0], -d[1], -d[2]];
    }
    out
}

/// Voxels of a volume selected by a mask.
#[derive(Debug, Clone)]
pub struct Roi<'a> {
    volume: &'a Volume,
    mask: &'a Mask,
    voxels: Vec<usize>,
    intensities: Vec<f64>,
}

impl<'a> Roi<'a> {
    pub fn volume(&self) -> &'a Volume {
        self.volume
    }

    pub fn mask(&self) -> &'a Mask {
        self.mask
    }

    pub fn grid(&self) -> &'a Grid {
        self.volume.grid()
    }

    /// Flat indices of the ROI voxels, ascending.
    pub fn voxels(&self) -> &[usize] {
        &self.voxels
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn len(&self) -> usize {
        self.voxels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voxels.is_empty()
    }
}

pub fn build_roi<'a>(v: &'a Volume, m: &'a Mask) -> Result<Roi<'a>> {
    validate_pair(v, m)?;
    let voxels: Vec<usize> = (0..m.labels().len()).filter(|&i| m.contains(i)).collect();
    if voxels.is_empty() {
        return Err(Error::EmptyMask);
    }
    let intensities = voxels.iter().map(|&i| v.voxels()[i] as f64).collect();
    Ok(Roi {
        volume: v,
        mask: m,
        voxels,
        intensities,
    })
}

/// Fixed-bin-number discretization of an ROI.
#[derive(Debug, Clone)]
pub struct DiscretizedRoi {
    grid: Grid,
    n_bins: u32,
    voxels: Vec<usize>,
    bins: Vec<u32>,
    level_map: Vec<u32>,
}

impl DiscretizedRoi {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_bins(&self) -> u32 {
        self.n_bins
    }

    pub fn voxels(&self) -> &[usize] {
        &self.voxels
    }

    /// Grey level (1-based) of each ROI voxel, parallel to [`voxels`](Self::voxels).
    pub fn bins(&self) -> &[u32] {
        &self.bins
    }

    /// Grey level at a flat grid index; 0 outside the ROI.
    #[inline]
    pub fn level_at(&self, flat: usize) -> u32 {
        self.level_map[flat]
    }

    /// Grey level at `c + d`, 0 when outside the grid or the ROI.
    #[inline]
    pub fn level_at_offset(&self, c: [usize; 3], d: [i64; 3]) -> u32 {
        self.grid.offset_index(c, d).map_or(0, |i| self.level_map[i])
    }

    pub fn len(&self) -> usize {
        self.voxels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voxels.is_empty()
    }

    pub fn min_level(&self) -> u32 {
        self.bins.iter().copied().min().unwrap_or(1)
    }

    pub fn max_level(&self) -> u32 {
        self.bins.iter().copied().max().unwrap_or(1)
    }

    /// Voxel count per grey level, index 0 unused.
    pub fn histogram(&self) -> Vec<u64> {
        let mut h = vec![0u64; self.n_bins as usize + 1];
        for &b in &self.bins {
            h[b as usize] += 1;
        }
        h
    }
}

/// Bin of `x` for an ROI spanning `[min, max]` with `n_bins` bins.
#[inline]
pub fn fbn_bin(x: f64, min: f64, max: f64, n_bins: u32) -> u32 {
    if max > min {
        let b = 1.0 + (n_bins as f64 * (x - min) / (max - min)).floor();
        (b as u32).clamp(1, n_bins)
    } else {
        1
    }
}

/// `bin(x) = min(Ng, 1 + floor(Ng (x - min) / (max - min)))`; a constant ROI is all bin 1.
pub fn discretize_fbn(roi: &Roi<'_>, n_bins: u32) -> Result<DiscretizedRoi> {
    if n_bins < 2 {
        return Err(Error::InvalidParameter(format!("n_bins must be >= 2, got {n_bins}")));
    }
    let (min, max) = roi
        .intensities()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let bins: Vec<u32> = roi.intensities().iter().map(|&x| fbn_bin(x, min, max, n_bins)).collect();
    let grid = roi.grid().clone();
    let mut level_map = vec![0u32; grid.len()];
    for (&v, &b) in roi.voxels().iter().zip(&bins) {
        level_map[v] = b;
    }
    Ok(DiscretizedRoi {
        grid,
        n_bins,
        voxels: roi.voxels().to_vec(),
        bins,
        level_map,
    })
}
