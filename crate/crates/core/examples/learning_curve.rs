// A short learning curve with a fast learner.

use speccam::evaluation::{curve_csv, learning_curve, stability_summary, CurveOptions, LearningCurve};
use speccam::phantom::{generate_dataset, DatasetOptions};
use speccam::regression::{FeatureMode, ModelKind, ModelSpec, SpectrumFeatures, TrainingSet};

pub fn run_example() -> speccam::Result<LearningCurve> {
    let ds = generate_dataset(200, &DatasetOptions::default(), 42)?;
    let sal = TrainingSet::from_records(&ds.records, FeatureMode::Sal, SpectrumFeatures::Raw)?;
    let rgbl = TrainingSet::from_records(&ds.records, FeatureMode::Rgbl, SpectrumFeatures::Raw)?;
    let spec = ModelSpec::new(ModelKind::Knn);
    let options = CurveOptions {
        fractions: vec![0.25, 0.5, 0.75, 1.0],
        ..CurveOptions::default()
    };
    let curve = learning_curve(&sal, &rgbl, &spec, &spec, &options)?;
    print!("{}", curve_csv(&curve));
    let s = stability_summary(&curve)?;
    println!("std of r across fractions: sal {:.4}, rgbl {:.4}", s.sal.r, s.rgbl.r);
    Ok(curve)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("curve runs");
}
