//! End-to-end orchestration and the command-line interface.
//!
//! Exit codes: 0 success, 2 invalid configuration or arguments, 3 failure
//! inside a stage. A failing stage leaves a `.partial` marker file in the
//! output directory holding the stage-tagged error message.

pub mod cli;
pub mod config;
pub mod report;
pub mod stages;

use std::fmt;
use std::fs;
use std::path::Path;

pub use config::{NetworkInput, PreprocessParams, RunConfig};
pub use report::{run_report, Summary};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_STAGE: i32 = 3;
pub const PARTIAL_MARKER: &str = ".partial";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Phantom,
    Preprocess,
    Quality,
    Extract,
    Correlate,
    Group,
    Classify,
    Report,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Phantom => "phantom",
            Stage::Preprocess => "preprocess",
            Stage::Quality => "quality",
            Stage::Extract => "extract",
            Stage::Correlate => "correlate",
            Stage::Group => "group",
            Stage::Classify => "classify",
            Stage::Report => "report",
        }
    }
}

/// An error tagged with the stage it came from; untagged errors are
/// configuration errors.
#[derive(Debug)]
pub struct PipelineError {
    pub stage: Option<Stage>,
    pub source: Error,
}

impl PipelineError {
    pub fn validation(source: Error) -> Self {
        PipelineError { stage: None, source }
    }

    pub fn exit_code(&self) -> i32 {
        if self.stage.is_some() {
            EXIT_STAGE
        } else {
            EXIT_VALIDATION
        }
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.stage {
            Some(s) => write!(f, "[{}] {}", s.as_str(), self.source),
            None => write!(f, "invalid configuration: {}", self.source),
        }
    }
}

impl std::error::Error for PipelineError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

pub type PipelineResult<T> = std::result::Result<T, PipelineError>;

/// Tag a stage result.
pub fn at<T>(stage: Stage, r: crate::Result<T>) -> PipelineResult<T> {
    r.map_err(|source| PipelineError {
        stage: Some(stage),
        source,
    })
}

/// Write the failure marker into `dir`.
pub fn mark_partial(dir: &Path, err: &PipelineError) {
    if fs::create_dir_all(dir).is_ok() {
        if let Err(e) = fs::write(dir.join(PARTIAL_MARKER), format!("{err}\n")) {
            log::warn!("could not write partial marker in {}: {e}", dir.display());
        }
    }
}

/// Remove a marker left by an earlier failed run.
pub fn clear_partial(dir: &Path) {
    let _ = fs::remove_file(dir.join(PARTIAL_MARKER));
}

/// Run `f` on a dedicated pool of `workers` threads (`None`: rayon default).
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> crate::Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(Error::InvalidParameter("workers must be at least 1".into()));
        }
        b = b.num_threads(n);
    }
    let pool = b.build().map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(pool.install(f))
}
