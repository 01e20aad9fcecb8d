// Generate a seeded phantom dataset and print a few records.

use speccam::formats::{dataset_from_csv, dataset_to_csv};
use speccam::phantom::{generate_dataset, DatasetOptions};

pub fn run_example() -> speccam::Result<usize> {
    let ds = generate_dataset(40, &DatasetOptions::default(), 42)?;
    for r in ds.records.iter().take(5) {
        println!(
            "{:>3}  BBL {:6.1} umol/L  rgb ({:5.1}, {:5.1}, {:5.1})  R460 {:.3}",
            r.id, r.bbl, r.rgb.r, r.rgb.g, r.rgb.b, r.spectrum.band_value(460.0)?
        );
    }
    let csv = dataset_to_csv(&ds.records);
    let back = dataset_from_csv(&csv)?;
    assert_eq!(back, ds.records);
    println!("{} records, {} bytes of CSV", back.len(), csv.len());
    Ok(back.len())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("simulation runs");
}
