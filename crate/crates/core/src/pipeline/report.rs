//! The full `report` pipeline, its summary JSON and the markdown report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::{NetworkInput, RunConfig};
use super::stages::{
    classify_to_files, correlate_to_csv, extract_to_csv, group_to_files, preprocess_cohort, quality_cohort,
    summarize_quality, write_quality_csv, QualitySummary,
};
use super::{at, clear_partial, mark_partial, PipelineError, PipelineResult, Stage};
use crate::error::Error;
use crate::fidelity::{write_profiles, Group, GroupAssignment, NetworkCorrelations, NetworkProfile};
use crate::format::{mean_sd, sig9};
use crate::phantom::{write_cohort, REFERENCE_DIR};
use crate::radiomics::N_FEATURES;

pub const SUMMARY_FILE: &str = "summary.json";
pub const REPORT_FILE: &str = "report.md";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub stage: String,
    pub kind: String,
    /// Relative to the output directory, `/`-separated.
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkQuality {
    pub network_id: String,
    pub high_performance: bool,
    /// `[mean, sd]` per metric; an infinite PSNR is written as null.
    #[serde(flatten)]
    pub metrics: QualitySummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkFidelity {
    pub network_id: String,
    pub mean_abs_rho: f64,
    pub group1_mean_abs_rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationSummary {
    pub source: String,
    pub accuracy_mean: f64,
    pub accuracy_sd: f64,
    pub auc_mean: f64,
    pub auc_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupCounts {
    pub group1: usize,
    pub group2: usize,
    pub group3: usize,
}

/// Machine-readable run summary. Contains no timestamps or absolute paths,
/// so identical runs give identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub n_bins: u32,
    pub tau: f64,
    pub ssim_cutoff: f64,
    pub n_cases: usize,
    pub n_features: usize,
    pub stages: Vec<String>,
    pub artifacts: Vec<Artifact>,
    pub quality: Vec<NetworkQuality>,
    pub fidelity: Vec<NetworkFidelity>,
    pub groups: Option<GroupCounts>,
    pub classification: Vec<ClassificationSummary>,
}

impl Summary {
    pub fn to_json(&self) -> crate::Result<String> {
        Ok(crate::format::to_json_pretty(self)?)
    }
}

struct Run<'a> {
    out: &'a Path,
    summary: Summary,
}

impl Run<'_> {
    fn record(&mut self, stage: Stage, kind: &str, path: &Path) {
        let rel = path
            .strip_prefix(self.out)
            .unwrap_or(path)
            .to_string_lossy()
            .replace('\\', "/");
        self.summary.artifacts.push(Artifact {
            stage: stage.as_str().to_string(),
            kind: kind.to_string(),
            path: rel,
        });
    }

    fn stage(&mut self, s: Stage) {
        self.summary.stages.push(s.as_str().to_string());
    }
}

/// Run every stage the config asks for and write `summary.json` and
/// `report.md` into the output directory.
pub fn run_report(cfg: &RunConfig) -> PipelineResult<Summary> {
    cfg.validate().map_err(PipelineError::validation)?;
    let out = cfg.output_dir.as_path();
    let r = run_inner(cfg, out);
    match &r {
        Ok(_) => clear_partial(out),
        Err(e) => mark_partial(out, e),
    }
    r
}

fn run_inner(cfg: &RunConfig, out: &Path) -> PipelineResult<Summary> {
    at(Stage::Report, fs::create_dir_all(out).map_err(|e| Error::io(out, e)))?;
    let mut run = Run {
        out,
        summary: Summary {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
            n_bins: cfg.n_bins,
            tau: cfg.tau,
            ssim_cutoff: cfg.ssim_cutoff,
            n_cases: 0,
            n_features: N_FEATURES,
            stages: Vec::new(),
            artifacts: Vec::new(),
            quality: Vec::new(),
            fidelity: Vec::new(),
            groups: None,
            classification: Vec::new(),
        },
    };

    // inputs: (name, manifest), reference first
    let mut cohorts: Vec<(String, PathBuf)> = Vec::new();
    if let Some(spec) = &cfg.phantom {
        run.stage(Stage::Phantom);
        let mut spec = spec.clone();
        spec.phantom.seed = cfg.seed;
        for (k, n) in spec.networks.iter_mut().enumerate() {
            n.degrade.seed = cfg.seed.wrapping_add(1 + k as u64);
        }
        let written = at(Stage::Phantom, write_cohort(&spec, out.join("cohort")))?;
        for (name, manifest) in written {
            run.record(Stage::Phantom, "manifest", &manifest);
            cohorts.push((name, manifest));
        }
    } else {
        let reference = cfg.reference_manifest.clone().expect("validated");
        cohorts.push((REFERENCE_DIR.to_string(), reference));
        for NetworkInput { network_id, manifest } in &cfg.networks {
            cohorts.push((network_id.clone(), manifest.clone()));
        }
    }

    if let Some(params) = &cfg.preprocess {
        run.stage(Stage::Preprocess);
        for (name, manifest) in cohorts.iter_mut() {
            let dir = out.join("preprocessed").join(&*name);
            *manifest = at(Stage::Preprocess, preprocess_cohort(manifest, params, &dir))?;
            run.record(Stage::Preprocess, "manifest", manifest);
        }
    }

    let networks: Vec<(String, PathBuf)> = cohorts[1..].to_vec();
    let reference = cohorts[0].1.clone();

    let mut profiles = Vec::new();
    if !networks.is_empty() {
        run.stage(Stage::Quality);
        let dir = out.join("quality");
        at(Stage::Quality, fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e)))?;
        for (name, manifest) in &networks {
            let rows = at(Stage::Quality, quality_cohort(&reference, manifest, &cfg.ssim))?;
            let path = dir.join(format!("quality_{name}.csv"));
            at(Stage::Quality, write_quality_csv(&path, &rows))?;
            run.record(Stage::Quality, "quality", &path);
            let metrics = summarize_quality(&rows);
            let profile = NetworkProfile::new(name.clone(), metrics.ssim[0], cfg.ssim_cutoff);
            run.summary.quality.push(NetworkQuality {
                network_id: name.clone(),
                high_performance: profile.high_performance,
                metrics,
            });
            profiles.push(profile);
        }
    }

    run.stage(Stage::Extract);
    let feat_dir = out.join("features");
    at(Stage::Extract, fs::create_dir_all(&feat_dir).map_err(|e| Error::io(&feat_dir, e)))?;
    let mut tables = Vec::new();
    for (name, manifest) in &cohorts {
        let path = feat_dir.join(format!("{name}.csv"));
        let t = at(Stage::Extract, extract_to_csv(manifest, cfg.n_bins, &path))?;
        run.record(Stage::Extract, "features", &path);
        tables.push((name.clone(), path, t));
    }
    run.summary.n_cases = tables[0].2.n_cases();

    let mut groups: Option<GroupAssignment> = None;
    if !networks.is_empty() {
        run.stage(Stage::Correlate);
        let dir = out.join("correlation");
        at(Stage::Correlate, fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e)))?;
        let mut corr = Vec::new();
        for (name, path, _) in &tables[1..] {
            let cpath = dir.join(format!("{name}.csv"));
            let t = at(Stage::Correlate, correlate_to_csv(&tables[0].1, path, &cpath))?;
            run.record(Stage::Correlate, "correlation", &cpath);
            corr.push(NetworkCorrelations {
                network_id: name.clone(),
                table: t,
            });
        }

        run.stage(Stage::Group);
        let gdir = out.join("groups");
        let g = at(Stage::Group, group_to_files(&corr, &profiles, cfg.tau, cfg.group_rule, &gdir))?;
        let ppath = gdir.join("profiles.json");
        at(Stage::Group, write_profiles(&ppath, &profiles))?;
        run.record(Stage::Group, "profiles", &ppath);
        run.record(Stage::Group, "groups", &gdir.join("groups.json"));
        run.record(Stage::Group, "group_summary", &gdir.join("groups_summary.csv"));
        let counts = g.counts();
        run.summary.groups = Some(GroupCounts {
            group1: counts[&Group::Group1],
            group2: counts[&Group::Group2],
            group3: counts[&Group::Group3],
        });
        for c in &corr {
            let g1 = g
                .summary
                .iter()
                .find(|s| s.group == Group::Group1 && s.network_id == c.network_id && s.n_features > 0)
                .map(|s| s.mean_abs_rho);
            run.summary.fidelity.push(NetworkFidelity {
                network_id: c.network_id.clone(),
                mean_abs_rho: c.table.mean_abs_rho(),
                group1_mean_abs_rho: g1,
            });
        }
        groups = Some(g);
    }

    if cfg.classify {
        run.stage(Stage::Classify);
        let dir = out.join("classification");
        let eval = crate::ml::EvalConfig {
            seed: cfg.seed,
            ..cfg.evaluation.clone()
        };
        for ((name, manifest), (_, _, table)) in cohorts.iter().zip(&tables) {
            let (rep, json, roc) = at(Stage::Classify, classify_to_files(table, manifest, &eval, name, &dir))?;
            run.record(Stage::Classify, "classification", &json);
            run.record(Stage::Classify, "roc", &roc);
            run.summary.classification.push(ClassificationSummary {
                source: name.clone(),
                accuracy_mean: rep.accuracy_mean,
                accuracy_sd: rep.accuracy_sd,
                auc_mean: rep.auc_mean,
                auc_sd: rep.auc_sd,
            });
        }
    }

    run.stage(Stage::Report);
    let report_path = out.join(REPORT_FILE);
    let md = markdown(&run.summary, groups.as_ref());
    at(Stage::Report, fs::write(&report_path, md).map_err(|e| Error::io(&report_path, e)))?;
    run.record(Stage::Report, "report", &report_path);
    let summary_path = out.join(SUMMARY_FILE);
    run.record(Stage::Report, "summary", &summary_path);
    let json = at(Stage::Report, run.summary.to_json())?;
    at(Stage::Report, fs::write(&summary_path, json).map_err(|e| Error::io(&summary_path, e)))?;
    Ok(run.summary)
}

/// `YYYY-MM-DD HH:MM:SS UTC` for a Unix time.
pub fn utc_timestamp(secs: u64) -> String {
    let days = (secs / 86_400) as i64;
    let rem = secs % 86_400;
    // civil-from-days
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = yoe + era * 400 + i64::from(m <= 2);
    format!(
        "{y:04}-{m:02}-{d:02} {:02}:{:02}:{:02} UTC",
        rem / 3600,
        rem % 3600 / 60,
        rem % 60
    )
}

fn cell(ms: [f64; 2]) -> String {
    mean_sd(ms[0], ms[1])
}

pub fn markdown(s: &Summary, groups: Option<&GroupAssignment>) -> String {
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let mut md = String::new();
    let _ = writeln!(md, "# radfid report\n\nGenerated {}.\n", utc_timestamp(now));
    let _ = writeln!(
        md,
        "Cases: {}. Features: {}. Grey levels: {}. Seed: {}.\n",
        s.n_cases, s.n_features, s.n_bins, s.seed
    );
    if !s.quality.is_empty() {
        let _ = writeln!(md, "## Image quality (mean ± SD over cases)\n");
        let _ = writeln!(md, "| network | MAE | MSE | PSNR (dB) | SSIM | SSIM > {} |", sig9(s.ssim_cutoff));
        let _ = writeln!(md, "|---|---|---|---|---|---|");
        for q in &s.quality {
            let m = &q.metrics;
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} | {} | {} |",
                q.network_id,
                cell(m.mae),
                cell(m.mse),
                cell(m.psnr_db),
                cell(m.ssim),
                if q.high_performance { "yes" } else { "no" }
            );
        }
        md.push('\n');
    }
    if let Some(g) = groups {
        let _ = writeln!(md, "## Feature groups (|ρ| ≥ {}), mean ± SD of |ρ|\n", sig9(s.tau));
        let mut header = "| group | features |".to_string();
        let mut rule = "|---|---|".to_string();
        for n in &g.networks {
            let _ = write!(header, " {} |", n.network_id);
            rule.push_str("---|");
        }
        let _ = writeln!(md, "{header}\n{rule}");
        let counts = g.counts();
        for grp in Group::ALL {
            let mut row = format!("| {} | {} |", grp.as_str(), counts[&grp]);
            for n in &g.networks {
                let c = g
                    .summary
                    .iter()
                    .find(|x| x.group == grp && x.network_id == n.network_id && x.n_features > 0)
                    .map_or_else(|| "-".to_string(), |x| mean_sd(x.mean_abs_rho, x.sd_abs_rho));
                let _ = write!(row, " {c} |");
            }
            let _ = writeln!(md, "{row}");
        }
        md.push('\n');
    }
    if !s.classification.is_empty() {
        let _ = writeln!(md, "## Risk classification (PCA + random forest)\n");
        let _ = writeln!(md, "| features | accuracy | AUC |\n|---|---|---|");
        for c in &s.classification {
            let _ = writeln!(
                md,
                "| {} | {} | {} |",
                c.source,
                mean_sd(c.accuracy_mean, c.accuracy_sd),
                mean_sd(c.auc_mean, c.auc_sd)
            );
        }
        md.push('\n');
    }
    md
}
