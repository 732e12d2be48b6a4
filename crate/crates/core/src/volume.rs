//! Volume and mask data model, the on-disk container and cohort manifests.
//!
//! A volume on disk is a JSON header plus a raw sidecar:
//!
//! ```json
//! {"dims":[nx,ny,nz],"spacing_mm":[sx,sy,sz],"origin_mm":[ox,oy,oz],"dtype":"f32le","data":"case.raw"}
//! ```
//!
//! The raw file holds `nx*ny*nz` samples, x fastest and z slowest, as
//! little-endian `f32` (`dtype = "f32le"`) or unsigned bytes (`dtype = "u8"`,
//! used for masks). Masks may also be stored as `f32le`; on load any
//! nonzero sample becomes label 1.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spacing agreement tolerance for [`validate_pair`], in millimetres.
pub const SPACING_TOLERANCE_MM: f64 = 1e-6;

/// Axis-aligned voxel grid geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dims: [usize; 3],
    pub spacing_mm: [f64; 3],
    pub origin_mm: [f64; 3],
}

impl Grid {
    pub fn new(dims: [usize; 3], spacing_mm: [f64; 3], origin_mm: [f64; 3]) -> Result<Self> {
        let grid = Grid {
            dims,
            spacing_mm,
            origin_mm,
        };
        grid.check()?;
        Ok(grid)
    }

    /// Unit spacing, zero origin.
    pub fn unit(dims: [usize; 3]) -> Result<Self> {
        Grid::new(dims, [1.0; 3], [0.0; 3])
    }

    fn check(&self) -> Result<()> {
        if self.dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidVolume(format!("dims must be positive, got {:?}", self.dims)));
        }
        if self.spacing_mm.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return Err(Error::InvalidVolume(format!(
                "spacing must be finite and positive, got {:?}",
                self.spacing_mm
            )));
        }
        if self.origin_mm.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidVolume(format!("origin must be finite, got {:?}", self.origin_mm)));
        }
        self.dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidVolume("voxel count overflows".into()))?;
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims[0] * (y + self.dims[1] * z)
    }

    #[inline]
    pub fn coords(&self, flat: usize) -> [usize; 3] {
        let nx = self.dims[0];
        let ny = self.dims[1];
        [flat % nx, (flat / nx) % ny, flat / (nx * ny)]
    }

    /// Flat index of `(x, y, z) + offset`, or `None` outside the grid.
    #[inline]
    pub fn offset_index(&self, c: [usize; 3], d: [i64; 3]) -> Option<usize> {
        let mut p = [0usize; 3];
        for a in 0..3 {
            let v = c[a] as i64 + d[a];
            if v < 0 || v >= self.dims[a] as i64 {
                return None;
            }
            p[a] = v as usize;
        }
        Some(self.index(p[0], p[1], p[2]))
    }
}

/// Anything that lives on a [`Grid`].
pub trait HasGrid {
    fn grid(&self) -> &Grid;
}

/// Dense scalar volume.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    grid: Grid,
    voxels: Vec<f32>,
    intensity_unit: String,
}

impl HasGrid for Volume {
    fn grid(&self) -> &Grid {
        &self.grid
    }
}

impl Volume {
    pub fn new(grid: Grid, voxels: Vec<f32>) -> Result<Self> {
        grid.check()?;
        if voxels.len() != grid.len() {
            return Err(Error::InvalidVolume(format!(
                "expected {} voxels for dims {:?}, got {}",
                grid.len(),
                grid.dims,
                voxels.len()
            )));
        }
        if let Some(index) = voxels.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Volume {
            grid,
            voxels,
            intensity_unit: "raw".to_string(),
        })
    }

    pub fn filled(grid: Grid, value: f32) -> Result<Self> {
        let n = grid.len();
        Volume::new(grid, vec![value; n])
    }

    pub fn with_unit(mut self, unit: impl Into<String>) -> Self {
        self.intensity_unit = unit.into();
        self
    }

    /// Same geometry, new samples.
    pub fn map_voxels(&self, voxels: Vec<f32>) -> Result<Self> {
        Ok(Volume::new(self.grid.clone(), voxels)?.with_unit(self.intensity_unit.clone()))
    }

    pub fn dims(&self) -> [usize; 3] {
        self.grid.dims
    }

    pub fn spacing_mm(&self) -> [f64; 3] {
        self.grid.spacing_mm
    }

    pub fn origin_mm(&self) -> [f64; 3] {
        self.grid.origin_mm
    }

    pub fn voxels(&self) -> &[f32] {
        &self.voxels
    }

    pub fn into_voxels(self) -> Vec<f32> {
        self.voxels
    }

    pub fn intensity_unit(&self) -> &str {
        &self.intensity_unit
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> f32 {
        self.voxels[self.grid.index(x, y, z)]
    }

    pub fn min_max(&self) -> (f32, f32) {
        self.voxels
            .iter()
            .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

/// Binary label volume.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    grid: Grid,
    labels: Vec<u8>,
}

impl HasGrid for Mask {
    fn grid(&self) -> &Grid {
        &self.grid
    }
}

impl Mask {
    /// Any nonzero label becomes 1.
    pub fn new(grid: Grid, labels: Vec<u8>) -> Result<Self> {
        grid.check()?;
        if labels.len() != grid.len() {
            return Err(Error::InvalidVolume(format!(
                "expected {} labels for dims {:?}, got {}",
                grid.len(),
                grid.dims,
                labels.len()
            )));
        }
        let labels = labels.into_iter().map(|l| u8::from(l != 0)).collect();
        Ok(Mask { grid, labels })
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(usize, usize, usize) -> bool) -> Result<Self> {
        let [nx, ny, nz] = grid.dims;
        let mut labels = Vec::with_capacity(grid.len());
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    labels.push(u8::from(f(x, y, z)));
                }
            }
        }
        Mask::new(grid, labels)
    }

    pub fn full(grid: Grid) -> Result<Self> {
        let n = grid.len();
        Mask::new(grid, vec![1; n])
    }

    pub fn dims(&self) -> [usize; 3] {
        self.grid.dims
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    #[inline]
    pub fn contains(&self, flat: usize) -> bool {
        self.labels[flat] != 0
    }

    pub fn count(&self) -> usize {
        self.labels.iter().filter(|&&l| l != 0).count()
    }
}

/// Succeeds iff both grids have equal dims and spacing (within [`SPACING_TOLERANCE_MM`]).
pub fn validate_pair(a: &impl HasGrid, b: &impl HasGrid) -> Result<()> {
    let (ga, gb) = (a.grid(), b.grid());
    if ga.dims != gb.dims {
        return Err(Error::DimensionMismatch {
            left: ga.dims,
            right: gb.dims,
        });
    }
    let close = ga
        .spacing_mm
        .iter()
        .zip(gb.spacing_mm.iter())
        .all(|(s, t)| (s - t).abs() <= SPACING_TOLERANCE_MM);
    if !close {
        return Err(Error::SpacingMismatch {
            left: ga.spacing_mm,
            right: gb.spacing_mm,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DType {
    #[serde(rename = "f32le")]
    F32Le,
    #[serde(rename = "u8")]
    U8,
}

impl DType {
    fn width(self) -> u64 {
        match self {
            DType::F32Le => 4,
            DType::U8 => 1,
        }
    }
}

/// JSON header of the on-disk container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub dims: [usize; 3],
    pub spacing_mm: [f64; 3],
    pub origin_mm: [f64; 3],
    pub dtype: DType,
    pub data: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intensity_unit: Option<String>,
}

fn raw_path_for(header_path: &Path) -> PathBuf {
    header_path.with_extension("raw")
}

fn read_header(path: &Path) -> Result<(Header, Vec<u8>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let header: Header = serde_json::from_str(&text).map_err(|e| Error::MalformedHeader {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let grid = Grid {
        dims: header.dims,
        spacing_mm: header.spacing_mm,
        origin_mm: header.origin_mm,
    };
    grid.check().map_err(|e| Error::MalformedHeader {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let data_path = path.parent().unwrap_or_else(|| Path::new(".")).join(&header.data);
    let bytes = fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?;
    let expected = grid.len() as u64 * header.dtype.width();
    if bytes.len() as u64 != expected {
        return Err(Error::SizeMismatch {
            expected,
            actual: bytes.len() as u64,
        });
    }
    Ok((header, bytes))
}

fn decode_f32(bytes: &[u8]) -> Vec<f32> {
    bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect()
}

/// Load a volume from its JSON header path.
pub fn read_volume(path: impl AsRef<Path>) -> Result<Volume> {
    let path = path.as_ref();
    let (header, bytes) = read_header(path)?;
    let voxels = match header.dtype {
        DType::F32Le => decode_f32(&bytes),
        DType::U8 => bytes.iter().map(|&b| b as f32).collect(),
    };
    let grid = Grid::new(header.dims, header.spacing_mm, header.origin_mm)?;
    let volume = Volume::new(grid, voxels)?;
    Ok(match header.intensity_unit {
        Some(unit) => volume.with_unit(unit),
        None => volume,
    })
}

/// Write `header` JSON at `path` and the raw samples next to it (`.raw`).
pub fn write_volume(volume: &Volume, path: impl AsRef<Path>) -> Result<()> {
    let mut raw = Vec::with_capacity(volume.voxels.len() * 4);
    for v in &volume.voxels {
        raw.extend_from_slice(&v.to_le_bytes());
    }
    write_container(
        path.as_ref(),
        &volume.grid,
        DType::F32Le,
        &raw,
        Some(volume.intensity_unit.clone()),
    )
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<Mask> {
    let path = path.as_ref();
    let (header, bytes) = read_header(path)?;
    let labels = match header.dtype {
        DType::U8 => bytes,
        DType::F32Le => {
            let values = decode_f32(&bytes);
            if let Some(index) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { index });
            }
            values.into_iter().map(|v| u8::from(v != 0.0)).collect()
        }
    };
    Mask::new(Grid::new(header.dims, header.spacing_mm, header.origin_mm)?, labels)
}

pub fn write_mask(mask: &Mask, path: impl AsRef<Path>) -> Result<()> {
    write_container(path.as_ref(), &mask.grid, DType::U8, &mask.labels, None)
}

fn write_container(path: &Path, grid: &Grid, dtype: DType, raw: &[u8], unit: Option<String>) -> Result<()> {
    let raw_path = raw_path_for(path);
    let data = raw_path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| Error::InvalidParameter(format!("bad output path {}", path.display())))?
        .to_string();
    let header = Header {
        dims: grid.dims,
        spacing_mm: grid.spacing_mm,
        origin_mm: grid.origin_mm,
        dtype,
        data,
        intensity_unit: unit,
    };
    let json = serde_json::to_string_pretty(&header)?;
    fs::write(&raw_path, raw).map_err(|e| Error::io(&raw_path, e))?;
    fs::write(path, json + "\n").map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Risk label: UCLA scores 1-3 map to low, 4-5 to high.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Low,
    High,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Low => "low",
            Label::High => "high",
        }
    }

    pub fn as_class(self) -> u8 {
        match self {
            Label::Low => 0,
            Label::High => 1,
        }
    }

    pub fn parse(s: &str) -> Result<Option<Label>> {
        match s.trim() {
            "" => Ok(None),
            "low" => Ok(Some(Label::Low)),
            "high" => Ok(Some(Label::High)),
            other => Err(Error::Manifest(format!("label must be low, high or empty, got {other:?}"))),
        }
    }
}

/// One row of a cohort manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseRecord {
    pub case_id: String,
    pub volume_path: PathBuf,
    pub mask_path: PathBuf,
    pub label: Option<Label>,
}

pub const MANIFEST_COLUMNS: [&str; 4] = ["case_id", "volume", "mask", "label"];

/// Read a manifest CSV. Relative paths resolve against the manifest's directory.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<CaseRecord>> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != MANIFEST_COLUMNS {
        return Err(Error::Manifest(format!(
            "columns must be exactly {}, got {}",
            MANIFEST_COLUMNS.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut records: Vec<CaseRecord> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for row in reader.records() {
        let row = row?;
        let case_id = row[0].to_string();
        if case_id.is_empty() {
            return Err(Error::Manifest("empty case_id".into()));
        }
        if !seen.insert(case_id.clone()) {
            return Err(Error::Manifest(format!("duplicate case_id {case_id}")));
        }
        records.push(CaseRecord {
            case_id,
            volume_path: base.join(&row[1]),
            mask_path: base.join(&row[2]),
            label: Label::parse(&row[3])?,
        });
    }
    Ok(records)
}

/// Write a manifest; paths under the manifest's directory are stored relative to it.
pub fn write_manifest(path: impl AsRef<Path>, records: &[CaseRecord]) -> Result<()> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let rel = |p: &Path| -> String {
        p.strip_prefix(base)
            .unwrap_or(p)
            .to_string_lossy()
            .replace('\\', "/")
    };
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(MANIFEST_COLUMNS)?;
    for r in records {
        writer.write_record([
            r.case_id.as_str(),
            &rel(&r.volume_path),
            &rel(&r.mask_path),
            r.label.map(Label::as_str).unwrap_or(""),
        ])?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Manifest(e.to_string()))?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
