//! Run configuration of the `report` pipeline and the shared CLI defaults.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::{GroupRule, DEFAULT_SSIM_CUTOFF, DEFAULT_TAU};
use crate::ml::EvalConfig;
use crate::phantom::CohortSpec;
use crate::quality::SsimConfig;
use crate::radiomics::DEFAULT_N_BINS;

/// One synthetic cohort to compare against the reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkInput {
    pub network_id: String,
    pub manifest: PathBuf,
}

/// Geometry standardization applied before any metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessParams {
    /// Output dims; `None` keeps the input grid.
    pub dims: Option<[usize; 3]>,
    /// Output spacing; `None` keeps the field of view.
    pub spacing_mm: Option<[f64; 3]>,
    pub normalize: bool,
}

impl Default for PreprocessParams {
    fn default() -> Self {
        PreprocessParams {
            dims: None,
            spacing_mm: None,
            normalize: true,
        }
    }
}

/// Every field has a default; relative paths resolve against the directory
/// of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    /// Master seed. In the `report` pipeline it replaces the phantom seed,
    /// the degradation seeds (`seed + 1 + k` for network `k`) and the
    /// evaluation seed.
    pub seed: u64,
    /// Generate this cohort first; its reference and networks become the inputs.
    pub phantom: Option<CohortSpec>,
    pub reference_manifest: Option<PathBuf>,
    pub networks: Vec<NetworkInput>,
    pub preprocess: Option<PreprocessParams>,
    pub n_bins: u32,
    pub tau: f64,
    pub ssim_cutoff: f64,
    pub group_rule: GroupRule,
    pub ssim: SsimConfig,
    pub classify: bool,
    pub evaluation: EvalConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            output_dir: PathBuf::from("radfid_out"),
            seed: 0,
            phantom: None,
            reference_manifest: None,
            networks: Vec::new(),
            preprocess: None,
            n_bins: DEFAULT_N_BINS,
            tau: DEFAULT_TAU,
            ssim_cutoff: DEFAULT_SSIM_CUTOFF,
            group_rule: GroupRule::default(),
            ssim: SsimConfig::default(),
            classify: true,
            evaluation: EvalConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Read a config file and resolve its relative paths.
    pub fn load(path: impl AsRef<Path>) -> Result<RunConfig> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::from_json(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.output_dir);
        if let Some(m) = cfg.reference_manifest.as_mut() {
            resolve(m);
        }
        for n in &mut cfg.networks {
            resolve(&mut n.manifest);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n_bins < 2 {
            return bad(format!("n_bins must be >= 2, got {}", self.n_bins));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return bad(format!("tau must lie in (0, 1), got {}", self.tau));
        }
        if !(0.0..=1.0).contains(&self.ssim_cutoff) {
            return bad(format!("ssim_cutoff must lie in [0, 1], got {}", self.ssim_cutoff));
        }
        self.ssim.validate()?;
        if self.phantom.is_none() && self.reference_manifest.is_none() {
            return bad("either phantom or reference_manifest must be set".into());
        }
        if self.phantom.is_some() && (self.reference_manifest.is_some() || !self.networks.is_empty()) {
            return bad("phantom cannot be combined with reference_manifest or networks".into());
        }
        let mut ids: Vec<&str> = self.networks.iter().map(|n| n.network_id.as_str()).collect();
        if let Some(p) = &self.phantom {
            ids.extend(p.networks.iter().map(|n| n.network_id.as_str()));
        }
        let unique: std::collections::HashSet<&&str> = ids.iter().collect();
        if unique.len() != ids.len() {
            return bad("network ids must be unique".into());
        }
        if ids.iter().any(|id| !valid_name(id)) {
            return bad("network ids may only use letters, digits, '-' and '_'".into());
        }
        Ok(())
    }
}

/// Names used in output file names.
/// Safe as a file stem: non-empty, letters, digits, '-' and '_'.
pub fn valid_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

/// Network ids additionally may not shadow the reference cohort.
pub fn valid_name(s: &str) -> bool {
    s != "reference" && valid_identifier(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut cfg = RunConfig {
            reference_manifest: Some("ref/manifest.csv".into()),
            ..RunConfig::default()
        };
        cfg.networks.push(NetworkInput {
            network_id: "blur".into(),
            manifest: "blur/manifest.csv".into(),
        });
        cfg.tau = 0.6;
        let back = RunConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::default();
        assert!(cfg.validate().is_err());
        cfg.reference_manifest = Some("m.csv".into());
        assert!(cfg.validate().is_ok());
        cfg.tau = 1.0;
        assert!(cfg.validate().is_err());
        assert!(RunConfig::from_json(r#"{"nbins": 3}"#).is_err());
    }
}
