//! `radfid` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::config::{PreprocessParams, RunConfig};
use super::report::run_report;
use super::stages::{
    classify_to_files, correlate_to_csv, extract_to_csv, group_to_files, preprocess_cohort, quality_cohort,
    summarize_quality, write_quality_csv,
};
use super::{at, clear_partial, mark_partial, with_workers, PipelineError, PipelineResult, Stage, EXIT_OK, EXIT_VALIDATION};
use crate::error::Error;
use crate::fidelity::{read_profiles, CorrelationTable, GroupRule, NetworkCorrelations};
use crate::format::mean_sd;
use crate::phantom::{write_cohort, CohortSpec};
use crate::radiomics::FeatureTable;

#[derive(Debug, Parser)]
#[command(name = "radfid", version, about = "Radiomic fidelity analysis for synthesized 3D volumes")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "JSON")]
    pub config: Option<PathBuf>,
    /// Worker threads (outputs do not depend on it).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub n_bins: Option<u32>,
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    #[arg(long, global = true)]
    pub ssim_cutoff: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded phantom cohort and its degraded copies.
    Phantom {
        /// Cohort spec JSON; defaults to the config's `phantom` entry.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Resample and normalize a cohort.
    Preprocess {
        #[arg(long)]
        manifest: PathBuf,
        /// Output dims as `X,Y,Z`.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        /// Output spacing in mm as `X,Y,Z`.
        #[arg(long, value_delimiter = ',')]
        spacing: Option<Vec<f64>>,
        #[arg(long)]
        no_normalize: bool,
        #[arg(long, default_value = "cohort")]
        name: String,
    },
    /// MAE, MSE, PSNR and SSIM of a candidate cohort against a reference.
    Quality {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long, default_value = "candidate")]
        name: String,
    },
    /// Extract all radiomic features of a cohort.
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "features")]
        name: String,
    },
    /// Spearman correlation of two feature tables.
    Correlate {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long, default_value = "candidate")]
        name: String,
    },
    /// Partition features into groups from per-network correlations.
    Group {
        /// `NETWORK_ID=correlation.csv`, repeatable.
        #[arg(long, required = true, value_parser = parse_pair)]
        correlation: Vec<(String, PathBuf)>,
        /// JSON list of `{"network_id", "mean_ssim"}`.
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long, value_parser = parse_rule)]
        rule: Option<GroupRule>,
    },
    /// PCA + random forest risk classification.
    Classify {
        #[arg(long)]
        features: PathBuf,
        /// Manifest carrying the labels.
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "features")]
        name: String,
    },
    /// Run the whole pipeline described by `--config`.
    Report,
}

fn parse_pair(s: &str) -> Result<(String, PathBuf), String> {
    let (id, path) = s.split_once('=').ok_or_else(|| format!("expected ID=PATH, got {s:?}"))?;
    if id.is_empty() || path.is_empty() {
        return Err(format!("expected ID=PATH, got {s:?}"));
    }
    Ok((id.to_string(), PathBuf::from(path)))
}

fn parse_rule(s: &str) -> Result<GroupRule, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Config file (if any) with the global flag overrides applied.
pub fn resolve_config(g: &GlobalArgs) -> PipelineResult<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p).map_err(PipelineError::validation)?,
        None => RunConfig::default(),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(d) = &g.out_dir {
        cfg.output_dir = d.clone();
    }
    if let Some(n) = g.n_bins {
        cfg.n_bins = n;
    }
    if let Some(t) = g.tau {
        cfg.tau = t;
    }
    if let Some(c) = g.ssim_cutoff {
        cfg.ssim_cutoff = c;
    }
    Ok(cfg)
}

fn invalid(msg: impl Into<String>) -> PipelineError {
    PipelineError::validation(Error::InvalidParameter(msg.into()))
}

fn check_name(name: &str) -> PipelineResult<()> {
    if super::config::valid_identifier(name) {
        Ok(())
    } else {
        Err(invalid(format!("name {name:?} may only use letters, digits, '-' and '_'")))
    }
}

fn triple<T: Copy>(v: &Option<Vec<T>>, flag: &str) -> PipelineResult<Option<[T; 3]>> {
    match v.as_deref() {
        None => Ok(None),
        Some(&[x, y, z]) => Ok(Some([x, y, z])),
        Some(other) => Err(invalid(format!("--{flag} takes 3 values, got {}", other.len()))),
    }
}

fn read_spec(path: &Path) -> PipelineResult<CohortSpec> {
    let text = fs::read_to_string(path).map_err(|e| PipelineError::validation(Error::io(path, e)))?;
    serde_json::from_str(&text).map_err(|e| PipelineError::validation(e.into()))
}

/// Execute one parsed command.
pub fn execute(cli: &Cli) -> PipelineResult<()> {
    let mut cfg = resolve_config(&cli.global)?;
    if let Command::Report = cli.command {
        if cli.global.config.is_none() {
            return Err(invalid("report requires --config"));
        }
        let summary = run_report(&cfg)?;
        log::info!(
            "report written to {} ({} artifacts)",
            cfg.output_dir.display(),
            summary.artifacts.len()
        );
        return Ok(());
    }
    // Single-stage commands only need the shared numeric parameters.
    let mut shallow = cfg.clone();
    shallow.phantom = None;
    shallow.networks.clear();
    shallow.reference_manifest = Some(PathBuf::new());
    shallow.validate().map_err(PipelineError::validation)?;

    let out = cfg.output_dir.clone();
    let r = single_stage(&cli.command, &mut cfg, cli.global.seed);
    match &r {
        Ok(()) => clear_partial(&out),
        Err(e) if e.stage.is_some() => mark_partial(&out, e),
        Err(_) => {}
    }
    r
}

fn single_stage(cmd: &Command, cfg: &mut RunConfig, seed_flag: Option<u64>) -> PipelineResult<()> {
    let out = cfg.output_dir.clone();
    let mkdir = |stage: Stage, d: &Path| at(stage, fs::create_dir_all(d).map_err(|e| Error::io(d, e)));
    match cmd {
        Command::Phantom { spec } => {
            let mut spec = match spec {
                Some(p) => read_spec(p)?,
                None => cfg.phantom.clone().ok_or_else(|| invalid("phantom needs --spec or a config with `phantom`"))?,
            };
            if let Some(s) = seed_flag {
                spec.phantom.seed = s;
                for (k, n) in spec.networks.iter_mut().enumerate() {
                    n.degrade.seed = s.wrapping_add(1 + k as u64);
                }
            }
            let written = at(Stage::Phantom, write_cohort(&spec, &out))?;
            for (name, manifest) in written {
                println!("{name}\t{}", manifest.display());
            }
        }
        Command::Preprocess {
            manifest,
            dims,
            spacing,
            no_normalize,
            name,
        } => {
            check_name(name)?;
            let params = PreprocessParams {
                dims: triple(dims, "dims")?,
                spacing_mm: triple(spacing, "spacing")?,
                normalize: !no_normalize,
            };
            let m = at(Stage::Preprocess, preprocess_cohort(manifest, &params, &out.join(name)))?;
            println!("{}", m.display());
        }
        Command::Quality { reference, candidate, name } => {
            check_name(name)?;
            let rows = at(Stage::Quality, quality_cohort(reference, candidate, &cfg.ssim))?;
            mkdir(Stage::Quality, &out)?;
            let path = out.join(format!("quality_{name}.csv"));
            at(Stage::Quality, write_quality_csv(&path, &rows))?;
            let s = summarize_quality(&rows);
            println!(
                "{name}\tmae {}\tmse {}\tpsnr {}\tssim {}",
                mean_sd(s.mae[0], s.mae[1]),
                mean_sd(s.mse[0], s.mse[1]),
                mean_sd(s.psnr_db[0], s.psnr_db[1]),
                mean_sd(s.ssim[0], s.ssim[1])
            );
        }
        Command::Extract { manifest, name } => {
            check_name(name)?;
            mkdir(Stage::Extract, &out)?;
            let path = out.join(format!("{name}.csv"));
            let t = at(Stage::Extract, extract_to_csv(manifest, cfg.n_bins, &path))?;
            println!("{}\t{} cases", path.display(), t.n_cases());
        }
        Command::Correlate { reference, candidate, name } => {
            check_name(name)?;
            mkdir(Stage::Correlate, &out)?;
            let path = out.join(format!("{name}.csv"));
            let t = at(Stage::Correlate, correlate_to_csv(reference, candidate, &path))?;
            println!("{name}\tmean |rho| {}", crate::format::sig9(t.mean_abs_rho()));
        }
        Command::Group {
            correlation,
            profiles,
            rule,
        } => {
            let profiles = at(Stage::Group, read_profiles(profiles, cfg.ssim_cutoff))?;
            let tables = correlation
                .iter()
                .map(|(id, p)| {
                    Ok(NetworkCorrelations {
                        network_id: id.clone(),
                        table: CorrelationTable::read_csv(p)?,
                    })
                })
                .collect::<crate::Result<Vec<_>>>();
            let tables = at(Stage::Group, tables)?;
            let rule = rule.unwrap_or(cfg.group_rule);
            let g = at(Stage::Group, group_to_files(&tables, &profiles, cfg.tau, rule, &out))?;
            for (grp, n) in g.counts() {
                println!("{}\t{n}", grp.as_str());
            }
        }
        Command::Classify { features, manifest, name } => {
            check_name(name)?;
            let table = at(Stage::Classify, FeatureTable::read_csv(features))?;
            let eval = crate::ml::EvalConfig {
                seed: cfg.seed,
                ..cfg.evaluation.clone()
            };
            let (rep, _, _) = at(Stage::Classify, classify_to_files(&table, manifest, &eval, name, &out))?;
            println!(
                "{name}\taccuracy {}\tauc {}",
                mean_sd(rep.accuracy_mean, rep.accuracy_sd),
                mean_sd(rep.auc_mean, rep.auc_sd)
            );
        }
        Command::Report => unreachable!("handled by execute"),
    }
    Ok(())
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = with_workers(cli.global.workers, || execute(&cli));
    match result {
        Ok(Ok(())) => EXIT_OK,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(e) => {
            eprintln!("error: invalid configuration: {e}");
            EXIT_VALIDATION
        }
    }
}
