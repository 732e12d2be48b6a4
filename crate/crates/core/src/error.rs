use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed header {path}: {reason}")]
    MalformedHeader { path: PathBuf, reason: String },

    #[error("size mismatch: header declares {expected} bytes, raw file has {actual}")]
    SizeMismatch { expected: u64, actual: u64 },

    #[error("non-finite voxel at flat index {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: [usize; 3], right: [usize; 3] },

    #[error("spacing mismatch: {left:?} vs {right:?}")]
    SpacingMismatch { left: [f64; 3], right: [f64; 3] },

    #[error("invalid volume: {0}")]
    InvalidVolume(String),

    #[error("empty mask")]
    EmptyMask,

    #[error("crop box out of bounds: corner {corner:?}, size {size:?}, volume {dims:?}")]
    CropOutOfBounds {
        corner: [i64; 3],
        size: [usize; 3],
        dims: [usize; 3],
    },

    #[error("volume {dims:?} smaller than SSIM window of width {window}")]
    WindowTooLarge { dims: [usize; 3], window: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("case sets differ: {0}")]
    CaseSetMismatch(String),

    #[error("unknown feature id: {0}")]
    UnknownFeature(String),

    #[error("only one class present")]
    SingleClass,

    #[error("class {class} absent from the {stratum} stratum")]
    ClassAbsent { class: u8, stratum: &'static str },

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
