// Cross-validated agreement, ROC and prediction band for SAL and RGBL features.

use speccam::evaluation::{evaluate, DEFAULT_ROC_THRESHOLD};
use speccam::phantom::{generate_dataset, DatasetOptions};
use speccam::regression::{FeatureMode, ModelKind, ModelSpec, SpectrumFeatures, TrainingSet};

pub fn run_example() -> speccam::Result<(f64, f64)> {
    let ds = generate_dataset(160, &DatasetOptions::default(), 5)?;
    let spec = ModelSpec::new(ModelKind::Rf).with_seed(5);
    let mut aurocs = Vec::new();
    for mode in [FeatureMode::Sal, FeatureMode::Rgbl] {
        let ts = TrainingSet::from_records(&ds.records, mode, SpectrumFeatures::Raw)?;
        let report = evaluate(&ts, &spec, 10, DEFAULT_ROC_THRESHOLD)?;
        let a = &report.agreement;
        println!(
            "{mode:>4}: r {:.3}  MD {:+.2}  LOA [{:.2}, {:.2}]  AUROC {:.3}",
            a.r, a.md, a.loa_lower, a.loa_upper, report.roc.auroc
        );
        aurocs.push(report.roc.auroc);
    }
    Ok((aurocs[0], aurocs[1]))
}

#[allow(dead_code)]
fn main() {
    run_example().expect("evaluation runs");
}
