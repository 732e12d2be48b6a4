//! Extract the full radiomic feature vector of one phantom case and print a
//! few features from each family.

use std::collections::BTreeMap;

use radfid::phantom::{generate_cohort, PhantomSpec};
use radfid::radiomics::{extract_all, family_of};

fn main() -> radfid::Result<()> {
    let spec = PhantomSpec { dims: [48, 48, 24], gland_semi_axes: [16.0, 14.0, 8.0], seed: 11, ..Default::default() };
    let case = generate_cohort(&spec, 1)?.remove(0);
    let fv = extract_all(&case.volume, &case.mask, 32)?;

    let mut families: BTreeMap<&str, Vec<(&str, f64)>> = BTreeMap::new();
    for (id, v) in fv.entries() {
        families.entry(family_of(id)).or_default().push((id, v));
    }
    println!("{} features, {} families, label {}", fv.len(), families.len(), case.label.as_str());
    for (family, feats) in &families {
        println!("{family} ({})", feats.len());
        for (id, v) in feats.iter().take(3) {
            println!("  {id:<60} {}", radfid::format::sig9(*v));
        }
    }
    Ok(())
}
