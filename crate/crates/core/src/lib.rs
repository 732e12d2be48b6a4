//! Fidelity analysis of radiomic features between original and
//! AI-processed MRI volumes.

pub mod error;
pub mod fidelity;
pub mod format;
pub mod ml;
pub mod phantom;
pub mod pipeline;
pub mod preprocess;
pub mod quality;
pub mod radiomics;
pub mod rng;
pub mod volume;

pub use error::{Error, Result};
pub use volume::{Grid, Mask, Volume};
