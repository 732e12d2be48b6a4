//! Seeded synthetic cohorts and degradation operators.
//!
//! A phantom is an ellipsoidal gland on a flat background. Inside the gland
//! the intensity is a smooth field (linear ramp plus low-frequency waves with
//! random phases) with fine Gaussian texture and up to a few spherical
//! lesions with cosine edges. A case is labelled `high` when any lesion's
//! contrast magnitude exceeds the spec threshold.
//!
//! `degrade` stands in for an image-synthesis network: optional lesion
//! dropout and false lesion, then Gaussian blur, gamma and clipped additive
//! noise.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};
use crate::volume::{
    validate_pair, write_manifest, write_mask, write_volume, CaseRecord, Grid, HasGrid, Label, Mask, Volume,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhantomSpec {
    pub dims: [usize; 3],
    pub spacing_mm: [f64; 3],
    /// Gland semi-axes in voxels.
    pub gland_semi_axes: [f64; 3],
    pub background: f64,
    pub gland_base: f64,
    /// Peak-to-peak amplitude of the smooth field inside the gland.
    pub ramp_amplitude: f64,
    /// Standard deviation of the voxelwise texture.
    pub texture_sigma: f64,
    pub lesion_count: [usize; 2],
    /// Radius range in voxels.
    pub lesion_radius: [f64; 2],
    /// Range of the contrast magnitude; the sign is drawn separately.
    pub lesion_contrast: [f64; 2],
    /// Probability that a lesion is hypointense.
    pub hypo_fraction: f64,
    pub high_risk_threshold: f64,
    pub seed: u64,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        PhantomSpec {
            dims: [64, 64, 32],
            spacing_mm: [1.0, 1.0, 2.0],
            gland_semi_axes: [22.0, 18.0, 11.0],
            background: 0.15,
            gland_base: 0.45,
            ramp_amplitude: 0.15,
            texture_sigma: 0.03,
            lesion_count: [0, 3],
            lesion_radius: [3.0, 6.0],
            lesion_contrast: [0.05, 0.35],
            hypo_fraction: 0.3,
            high_risk_threshold: 0.2,
            seed: 0,
        }
    }
}

impl PhantomSpec {
    pub fn centre(&self) -> [f64; 3] {
        [0, 1, 2].map(|k| (self.dims[k] as f64 - 1.0) / 2.0)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dims, self.spacing_mm, [0.0; 3])
    }

    /// Ellipsoid membership at voxel centre `(x, y, z)`.
    pub fn in_gland(&self, x: usize, y: usize, z: usize) -> bool {
        let c = self.centre();
        let p = [x as f64, y as f64, z as f64];
        (0..3)
            .map(|k| ((p[k] - c[k]) / self.gland_semi_axes[k]).powi(2))
            .sum::<f64>()
            <= 1.0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        let c = self.centre();
        for k in 0..3 {
            if self.dims[k] < 2 {
                return bad(format!("dims {:?} too small", self.dims));
            }
            if !(self.gland_semi_axes[k] > 0.0 && self.gland_semi_axes[k] <= c[k]) {
                return bad(format!("gland semi-axes {:?} do not fit dims {:?}", self.gland_semi_axes, self.dims));
            }
        }
        if self.lesion_count[0] > self.lesion_count[1] {
            return bad(format!("lesion count range {:?}", self.lesion_count));
        }
        let [r0, r1] = self.lesion_radius;
        let min_axis = self.gland_semi_axes.iter().copied().fold(f64::INFINITY, f64::min);
        if self.lesion_count[1] > 0 && !(r0 > 0.0 && r0 <= r1 && r1 < min_axis) {
            return bad(format!("lesion radius range {:?} does not fit the gland", self.lesion_radius));
        }
        let [c0, c1] = self.lesion_contrast;
        if !(0.0..=1.0).contains(&c0) || c0 > c1 || c1 > 1.0 {
            return bad(format!("lesion contrast range {:?}", self.lesion_contrast));
        }
        if !(0.0..=1.0).contains(&self.hypo_fraction) {
            return bad(format!("hypo_fraction {}", self.hypo_fraction));
        }
        if self.texture_sigma < 0.0 || self.ramp_amplitude < 0.0 {
            return bad("negative texture or ramp amplitude".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lesion {
    /// Centre in voxel coordinates.
    pub centre: [f64; 3],
    /// Radius in voxels.
    pub radius: f64,
    /// Signed intensity offset at the core.
    pub contrast: f64,
}

impl Lesion {
    /// Profile weight: 1 in the core (`d ≤ 0.6 r`), cosine taper to 0 at `r`.
    pub fn weight(&self, x: usize, y: usize, z: usize) -> f64 {
        let p = [x as f64, y as f64, z as f64];
        let d = (0..3).map(|k| (p[k] - self.centre[k]).powi(2)).sum::<f64>().sqrt();
        let core = 0.6 * self.radius;
        if d <= core {
            1.0
        } else if d >= self.radius {
            0.0
        } else {
            0.5 * (1.0 + (std::f64::consts::PI * (d - core) / (self.radius - core)).cos())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhantomCase {
    pub case_id: String,
    pub volume: Volume,
    pub mask: Mask,
    pub label: Label,
    pub lesions: Vec<Lesion>,
}

pub fn case_id(index: usize) -> String {
    format!("case_{index:03}")
}

/// Centre such that a sphere of `radius` lies inside the gland.
fn lesion_centre(spec: &PhantomSpec, radius: f64, rng: &mut ChaCha8Rng) -> [f64; 3] {
    let c = spec.centre();
    let inner = spec.gland_semi_axes.map(|a| a - radius);
    loop {
        let u: [f64; 3] = [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)];
        if u.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            return [0, 1, 2].map(|k| c[k] + u[k] * inner[k]);
        }
    }
}

fn add_lesion(voxels: &mut [f32], grid: &Grid, mask: &Mask, l: &Lesion, scale: f64) {
    let r = l.radius.ceil() as i64;
    let lo = l.centre.map(|c| (c.floor() as i64 - r).max(0));
    for z in lo[2]..=(l.centre[2].ceil() as i64 + r).min(grid.dims[2] as i64 - 1) {
        for y in lo[1]..=(l.centre[1].ceil() as i64 + r).min(grid.dims[1] as i64 - 1) {
            for x in lo[0]..=(l.centre[0].ceil() as i64 + r).min(grid.dims[0] as i64 - 1) {
                let (x, y, z) = (x as usize, y as usize, z as usize);
                let i = grid.index(x, y, z);
                let w = l.weight(x, y, z);
                if w > 0.0 && mask.contains(i) {
                    voxels[i] = (voxels[i] as f64 + scale * w * l.contrast) as f32;
                }
            }
        }
    }
}

fn generate_case(spec: &PhantomSpec, index: usize) -> Result<PhantomCase> {
    let grid = spec.grid()?;
    let mut rng = stream(spec.seed, index as u64, Purpose::Phantom);
    let mask = Mask::from_fn(grid.clone(), |x, y, z| spec.in_gland(x, y, z))?;

    let phases: [f64; 3] = [0, 1, 2].map(|_| rng.random_range(0.0..std::f64::consts::TAU));
    let tilt: f64 = rng.random_range(-1.0..=1.0);
    let n_lesions = rng.random_range(spec.lesion_count[0]..=spec.lesion_count[1]);
    let mut lesions = Vec::with_capacity(n_lesions);
    for _ in 0..n_lesions {
        let radius = rng.random_range(spec.lesion_radius[0]..=spec.lesion_radius[1]);
        let centre = lesion_centre(spec, radius, &mut rng);
        let magnitude = rng.random_range(spec.lesion_contrast[0]..=spec.lesion_contrast[1]);
        let sign = if rng.random_bool(spec.hypo_fraction) { -1.0 } else { 1.0 };
        lesions.push(Lesion {
            centre,
            radius,
            contrast: sign * magnitude,
        });
    }
    let texture = Normal::new(0.0, spec.texture_sigma.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;

    let c = spec.centre();
    let a = spec.gland_semi_axes;
    let mut voxels = vec![spec.background as f32; grid.len()];
    for z in 0..spec.dims[2] {
        for y in 0..spec.dims[1] {
            for x in 0..spec.dims[0] {
                let i = grid.index(x, y, z);
                if !mask.contains(i) {
                    continue;
                }
                let u = [(x as f64 - c[0]) / a[0], (y as f64 - c[1]) / a[1], (z as f64 - c[2]) / a[2]];
                let ramp = 0.5 * (u[0] + tilt * u[1]) / (1.0 + tilt.abs());
                let waves = ((2.0 * u[0] + phases[0]).sin() + (2.0 * u[1] + phases[1]).sin() + (2.0 * u[2] + phases[2]).sin()) / 6.0;
                let tex = if spec.texture_sigma > 0.0 { texture.sample(&mut rng) } else { 0.0 };
                voxels[i] = (spec.gland_base + spec.ramp_amplitude * (ramp + waves) + tex) as f32;
            }
        }
    }
    for l in &lesions {
        add_lesion(&mut voxels, &grid, &mask, l, 1.0);
    }
    for v in voxels.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
    let high = lesions.iter().any(|l| l.contrast.abs() > spec.high_risk_threshold);
    Ok(PhantomCase {
        case_id: case_id(index),
        volume: Volume::new(grid, voxels)?,
        mask,
        label: if high { Label::High } else { Label::Low },
        lesions,
    })
}

/// `n_cases` phantoms; case `i` depends only on `(spec, i)`.
pub fn generate_cohort(spec: &PhantomSpec, n_cases: usize) -> Result<Vec<PhantomCase>> {
    spec.validate()?;
    if n_cases == 0 {
        return Err(Error::InvalidParameter("n_cases must be at least 1".into()));
    }
    (0..n_cases).into_par_iter().map(|i| generate_case(spec, i)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DegradeSpec {
    /// Gaussian blur standard deviation in voxels.
    pub blur_sigma: f64,
    pub noise_sigma: f64,
    pub gamma: f64,
    pub lesion_dropout: bool,
    pub false_lesion: bool,
    pub seed: u64,
}

impl Default for DegradeSpec {
    fn default() -> Self {
        DegradeSpec {
            blur_sigma: 0.0,
            noise_sigma: 0.0,
            gamma: 1.0,
            lesion_dropout: false,
            false_lesion: false,
            seed: 0,
        }
    }
}

impl DegradeSpec {
    pub fn is_identity(&self) -> bool {
        self.blur_sigma == 0.0 && self.noise_sigma == 0.0 && self.gamma == 1.0 && !self.lesion_dropout && !self.false_lesion
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.blur_sigma >= 0.0 && self.noise_sigma >= 0.0 && self.gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("invalid degrade spec {self:?}")));
        }
        Ok(())
    }
}

fn gaussian_blur(voxels: &[f32], dims: [usize; 3], sigma: f64) -> Vec<f32> {
    let r = (3.0 * sigma).ceil() as i64;
    let taps: Vec<f64> = (-r..=r).map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let norm: f64 = taps.iter().sum();
    let taps: Vec<f64> = taps.iter().map(|t| t / norm).collect();
    let mut cur: Vec<f64> = voxels.iter().map(|&v| v as f64).collect();
    let strides = [1, dims[0], dims[0] * dims[1]];
    for axis in 0..3 {
        let n = dims[axis] as i64;
        let mut next = vec![0.0; cur.len()];
        for (i, out) in next.iter_mut().enumerate() {
            let pos = (i / strides[axis]) as i64 % n;
            let base = i - pos as usize * strides[axis];
            *out = taps
                .iter()
                .enumerate()
                .map(|(t, w)| {
                    let q = (pos + t as i64 - r).clamp(0, n - 1) as usize;
                    w * cur[base + q * strides[axis]]
                })
                .sum();
        }
        cur = next;
    }
    cur.into_iter().map(|v| v as f32).collect()
}

/// Apply `spec` to one case. `lesions` are the case's known lesions (used by
/// dropout); `case` keys the random stream.
pub fn degrade(v: &Volume, m: &Mask, lesions: &[Lesion], spec: &DegradeSpec, case: u64) -> Result<Volume> {
    validate_pair(v, m)?;
    spec.validate()?;
    if spec.is_identity() {
        return Ok(v.clone());
    }
    let grid = v.grid().clone();
    let mut rng = stream(spec.seed, case, Purpose::Degrade);
    let mut voxels = v.voxels().to_vec();

    if spec.lesion_dropout {
        if let Some(l) = lesions.iter().max_by(|a, b| a.contrast.abs().total_cmp(&b.contrast.abs())) {
            add_lesion(&mut voxels, &grid, m, l, -1.0);
        }
    }
    if spec.false_lesion {
        let gland: Vec<[usize; 3]> = (0..grid.len()).filter(|&i| m.contains(i)).map(|i| grid.coords(i)).collect();
        if !gland.is_empty() {
            let at = gland[rng.random_range(0..gland.len())];
            let l = Lesion {
                centre: at.map(|c| c as f64),
                radius: 4.0,
                contrast: 0.3,
            };
            add_lesion(&mut voxels, &grid, m, &l, 1.0);
        }
    }
    if spec.blur_sigma > 0.0 {
        voxels = gaussian_blur(&voxels, grid.dims, spec.blur_sigma);
    }
    if spec.gamma != 1.0 {
        for x in voxels.iter_mut() {
            *x = (x.clamp(0.0, 1.0) as f64).powf(spec.gamma) as f32;
        }
    }
    if spec.noise_sigma > 0.0 {
        let noise = Normal::new(0.0, spec.noise_sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        for x in voxels.iter_mut() {
            *x = (*x as f64 + noise.sample(&mut rng)).clamp(0.0, 1.0) as f32;
        }
    }
    v.map_voxels(voxels)
}

/// A degradation standing in for one synthesis network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub network_id: String,
    pub degrade: DegradeSpec,
}

/// Input of the `phantom` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    #[serde(default)]
    pub phantom: PhantomSpec,
    pub n_cases: usize,
    #[serde(default)]
    pub networks: Vec<NetworkSpec>,
}

/// Name of the reference cohort directory.
pub const REFERENCE_DIR: &str = "reference";

fn write_cases(dir: &Path, cases: &[PhantomCase], volumes: &[Volume]) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut records = Vec::with_capacity(cases.len());
    for (c, v) in cases.iter().zip(volumes) {
        let vp = dir.join(format!("{}.json", c.case_id));
        let mp = dir.join(format!("{}_mask.json", c.case_id));
        write_volume(v, &vp)?;
        write_mask(&c.mask, &mp)?;
        records.push(CaseRecord {
            case_id: c.case_id.clone(),
            volume_path: vp,
            mask_path: mp,
            label: Some(c.label),
        });
    }
    let manifest = dir.join("manifest.csv");
    write_manifest(&manifest, &records)?;
    Ok(manifest)
}

/// Generate the reference cohort and one degraded copy per network under
/// `out`, each in its own directory with a `manifest.csv`. Returns
/// `(cohort name, manifest path)` pairs, reference first.
pub fn write_cohort(spec: &CohortSpec, out: impl AsRef<Path>) -> Result<Vec<(String, PathBuf)>> {
    let out = out.as_ref();
    let cases = generate_cohort(&spec.phantom, spec.n_cases)?;
    let mut written = Vec::new();
    let reference: Vec<Volume> = cases.iter().map(|c| c.volume.clone()).collect();
    written.push((REFERENCE_DIR.to_string(), write_cases(&out.join(REFERENCE_DIR), &cases, &reference)?));
    for net in &spec.networks {
        if net.network_id == REFERENCE_DIR || net.network_id.is_empty() || net.network_id.contains(['/', '\\']) {
            return Err(Error::InvalidParameter(format!("invalid network id {:?}", net.network_id)));
        }
        let degraded = cases
            .par_iter()
            .enumerate()
            .map(|(i, c)| degrade(&c.volume, &c.mask, &c.lesions, &net.degrade, i as u64))
            .collect::<Result<Vec<_>>>()?;
        written.push((net.network_id.clone(), write_cases(&out.join(&net.network_id), &cases, &degraded)?));
    }
    Ok(written)
}
