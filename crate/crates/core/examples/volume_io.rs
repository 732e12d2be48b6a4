//! Write a volume and mask to disk, list them in a manifest, read them back.

use radfid::volume::{read_manifest, read_mask, read_volume, write_manifest, write_mask, write_volume, CaseRecord, Label};
use radfid::{Grid, Mask, Volume};

fn main() -> radfid::Result<()> {
    let dir = std::env::temp_dir().join("radfid_volume_io");
    std::fs::create_dir_all(&dir).unwrap();

    let grid = Grid::new([16, 16, 8], [0.5, 0.5, 2.0], [0.0; 3])?;
    let voxels: Vec<f32> = (0..grid.len()).map(|i| (i % 17) as f32 / 16.0).collect();
    let volume = Volume::new(grid.clone(), voxels)?.with_unit("normalized");
    let mask = Mask::from_fn(grid, |x, y, _| (4..12).contains(&x) && (4..12).contains(&y))?;

    write_volume(&volume, dir.join("case_000.json"))?;
    write_mask(&mask, dir.join("case_000_mask.json"))?;
    write_manifest(
        dir.join("manifest.csv"),
        &[CaseRecord {
            case_id: "case_000".into(),
            volume_path: "case_000.json".into(),
            mask_path: "case_000_mask.json".into(),
            label: Some(Label::High),
        }],
    )?;

    for rec in read_manifest(dir.join("manifest.csv"))? {
        let v = read_volume(&rec.volume_path)?;
        let m = read_mask(&rec.mask_path)?;
        assert_eq!(v, volume);
        println!(
            "{}: dims {:?}, spacing {:?} mm, {} mask voxels, label {:?}",
            rec.case_id,
            v.dims(),
            v.spacing_mm(),
            m.count(),
            rec.label.map(|l| l.as_str())
        );
    }
    Ok(())
}
