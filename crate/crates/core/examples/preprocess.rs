//! Crop, resample and normalize a volume onto a common grid.

use radfid::preprocess::{crop, crop_mask, minmax_normalize, resample, resample_mask, spacing_for_dims, CropSpec, Interpolation};
use radfid::volume::HasGrid;
use radfid::{Grid, Mask, Volume};

fn main() -> radfid::Result<()> {
    let grid = Grid::new([40, 40, 20], [0.8, 0.8, 2.5], [0.0; 3])?;
    let voxels = (0..grid.len()).map(|i| {
        let [x, y, z] = grid.coords(i);
        (100.0 + 3.0 * x as f64 + 2.0 * y as f64 + z as f64) as f32
    });
    let ct = Volume::new(grid.clone(), voxels.collect())?.with_unit("HU");
    let mask = Mask::from_fn(grid, |x, y, z| {
        let d = |a: usize, c: f64, r: f64| (a as f64 - c) / r;
        d(x, 20.0, 9.0).powi(2) + d(y, 20.0, 8.0).powi(2) + d(z, 10.0, 4.0).powi(2) <= 1.0
    })?;

    let box_ = CropSpec { center_voxel: [20, 20, 10], out_dims: [24, 24, 12] };
    let (v, m) = (crop(&ct, &box_)?, crop_mask(&mask, &box_)?);

    let dims = [32, 32, 32];
    let spacing = spacing_for_dims(v.grid(), dims);
    let v = resample(&v, dims, spacing, Interpolation::Trilinear)?;
    let m = resample_mask(&m, dims, spacing)?;
    let v = minmax_normalize(&v);

    let (lo, hi) = v.min_max();
    println!("dims {:?} spacing {:?}", v.dims(), v.spacing_mm());
    println!("intensity range [{lo}, {hi}] in {}", v.intensity_unit());
    println!("mask voxels {} -> {}", mask.count(), m.count());
    Ok(())
}
