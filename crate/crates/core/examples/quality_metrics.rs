//! MAE, MSE, PSNR and 3D SSIM between a phantom and degraded copies.

use radfid::phantom::{degrade, generate_cohort, DegradeSpec, PhantomSpec};
use radfid::quality::{quality_report, SsimConfig};

fn main() -> radfid::Result<()> {
    let spec = PhantomSpec { dims: [48, 48, 24], gland_semi_axes: [16.0, 14.0, 8.0], seed: 3, ..Default::default() };
    let case = generate_cohort(&spec, 1)?.remove(0);
    let cfg = SsimConfig::default();

    let settings = [
        ("identity", DegradeSpec::default()),
        ("blur 0.8", DegradeSpec { blur_sigma: 0.8, ..Default::default() }),
        ("gamma 1.4", DegradeSpec { gamma: 1.4, ..Default::default() }),
        ("noise 0.1", DegradeSpec { noise_sigma: 0.1, seed: 1, ..Default::default() }),
    ];
    println!("{:<10} {:>9} {:>9} {:>9} {:>7}", "network", "mae", "mse", "psnr_db", "ssim");
    for (name, d) in settings {
        let synth = degrade(&case.volume, &case.mask, &case.lesions, &d, 0)?;
        let q = quality_report(&case.volume, &synth, &cfg)?;
        println!("{name:<10} {:>9.5} {:>9.6} {:>9.3} {:>7.4}", q.mae, q.mse, q.psnr_db, q.ssim);
    }
    Ok(())
}
