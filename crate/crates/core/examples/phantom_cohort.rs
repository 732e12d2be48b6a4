//! Generate a labelled phantom cohort plus degraded "network" copies on disk.

use radfid::phantom::{write_cohort, CohortSpec, DegradeSpec, NetworkSpec, PhantomSpec};
use radfid::volume::read_manifest;

fn main() -> radfid::Result<()> {
    let out = std::env::temp_dir().join("radfid_phantom_cohort");
    let spec = CohortSpec {
        phantom: PhantomSpec { dims: [32, 32, 16], gland_semi_axes: [11.0, 10.0, 6.0], lesion_radius: [2.0, 4.0], seed: 1, ..Default::default() },
        n_cases: 8,
        networks: vec![
            NetworkSpec { network_id: "gamma".into(), degrade: DegradeSpec { gamma: 1.3, ..Default::default() } },
            NetworkSpec {
                network_id: "dropout".into(),
                degrade: DegradeSpec { lesion_dropout: true, seed: 4, ..Default::default() },
            },
        ],
    };
    for (name, manifest) in write_cohort(&spec, &out)? {
        let records = read_manifest(&manifest)?;
        let high = records.iter().filter(|r| r.label.is_some_and(|l| l.as_class() == 1)).count();
        println!("{name:<10} {} cases ({high} high risk) -> {}", records.len(), manifest.display());
    }
    Ok(())
}
