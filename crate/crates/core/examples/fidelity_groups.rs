//! Spearman fidelity of radiomic features under two degradations, a paired
//! t-test on one feature, and the three-way feature grouping.

use radfid::fidelity::{assign_groups, correlate_cohorts, paired_t_test, GroupRule, NetworkCorrelations, NetworkProfile};
use radfid::phantom::{degrade, generate_cohort, DegradeSpec, PhantomSpec};
use radfid::quality::{ssim3d, SsimConfig};
use radfid::radiomics::{extract_cohort_cases, FeatureTable};

const N_BINS: u32 = 32;

fn main() -> radfid::Result<()> {
    let spec = PhantomSpec { dims: [40, 40, 20], gland_semi_axes: [14.0, 12.0, 7.0], seed: 7, ..Default::default() };
    let cases = generate_cohort(&spec, 16)?;
    let table = |vols: &[radfid::Volume]| -> radfid::Result<FeatureTable> {
        let rows: Vec<_> = cases.iter().zip(vols).map(|(c, v)| (c.case_id.clone(), v, &c.mask)).collect();
        extract_cohort_cases(&rows, N_BINS)
    };
    let reference = table(&cases.iter().map(|c| c.volume.clone()).collect::<Vec<_>>())?;

    let networks = [
        ("mild_blur", DegradeSpec { blur_sigma: 0.6, ..Default::default() }),
        ("heavy_noise", DegradeSpec { noise_sigma: 0.25, seed: 2, ..Default::default() }),
    ];
    let (mut tables, mut profiles) = (Vec::new(), Vec::new());
    for (id, d) in &networks {
        let synth = cases
            .iter()
            .enumerate()
            .map(|(i, c)| degrade(&c.volume, &c.mask, &c.lesions, d, i as u64))
            .collect::<radfid::Result<Vec<_>>>()?;
        let ssim: f64 = cases
            .iter()
            .zip(&synth)
            .map(|(c, s)| ssim3d(&c.volume, s, &SsimConfig::default()))
            .sum::<radfid::Result<f64>>()?
            / cases.len() as f64;
        let candidate = table(&synth)?;
        let corr = correlate_cohorts(&reference, &candidate)?;
        println!("{id}: mean ssim {ssim:.3}, mean |rho| {:.3}", corr.mean_abs_rho());

        let f = "intensity_stats.mean";
        let t = paired_t_test(&reference.column(f)?, &candidate.column(f)?)?;
        println!("  {f}: t = {:.3}, df = {}, p = {:.4}", t.t, t.df, t.p);

        profiles.push(NetworkProfile::new(*id, ssim, 0.85));
        tables.push(NetworkCorrelations { network_id: id.to_string(), table: corr });
    }

    let groups = assign_groups(&tables, &profiles, 0.5, GroupRule::AnyLowPerformer)?;
    for (g, n) in groups.counts() {
        println!("{}: {n} features", g.as_str());
    }
    for s in &groups.summary {
        println!("  {} {}: {}", s.group.as_str(), s.network_id, radfid::format::mean_sd(s.mean_abs_rho, s.sd_abs_rho));
    }
    Ok(())
}
