//! Low/high risk classification from radiomic features: PCA, random forest,
//! repeated stratified splits, ROC.

use radfid::ml::{evaluate, Dataset, EvalConfig};
use radfid::phantom::{generate_cohort, PhantomSpec};
use radfid::radiomics::extract_cohort_cases;

fn main() -> radfid::Result<()> {
    let spec = PhantomSpec { dims: [40, 40, 20], gland_semi_axes: [14.0, 12.0, 7.0], seed: 21, ..Default::default() };
    let cases = generate_cohort(&spec, 40)?;
    let rows: Vec<_> = cases.iter().map(|c| (c.case_id.clone(), &c.volume, &c.mask)).collect();
    let table = extract_cohort_cases(&rows, 32)?;
    let y: Vec<u8> = cases.iter().map(|c| c.label.as_class()).collect();
    let ds = Dataset::new(table.case_ids().to_vec(), table.feature_ids().to_vec(), table.rows().to_vec(), y)?;

    let cfg = EvalConfig { repeats: 3, seed: 1, ..Default::default() };
    for (name, data) in [("true labels", ds.clone()), ("permuted labels", ds.permuted_labels(5))] {
        let r = evaluate(&data, &cfg)?;
        println!("{name}: accuracy {:.3} ± {:.3}, auc {:.3} ± {:.3}", r.accuracy_mean, r.accuracy_sd, r.auc_mean, r.auc_sd);
        for rep in &r.repeats {
            println!(
                "  repeat {}: {} pcs, depth {}, test n = {}, accuracy {:.3}",
                rep.repeat, rep.n_components, rep.selected_depth, rep.n_test, rep.accuracy
            );
        }
        println!("  {} roc points", r.roc.len());
    }
    Ok(())
}
