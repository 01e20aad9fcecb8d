// Train every learner on the same spectra and compare a held-out prediction.

use speccam::phantom::{generate_dataset, DatasetOptions};
use speccam::regression::{train, FeatureMode, ModelKind, ModelSpec, SpectrumFeatures, TrainingSet};

pub fn run_example() -> speccam::Result<Vec<(ModelKind, f64)>> {
    let ds = generate_dataset(120, &DatasetOptions::default(), 11)?;
    let ts = TrainingSet::from_records(&ds.records, FeatureMode::Sal, SpectrumFeatures::Raw)?;
    let train_rows: Vec<usize> = (0..100).collect();
    let held_out = ts.subset(&(100..120).collect::<Vec<_>>());
    let fit_on = ts.subset(&train_rows);

    let mut out = Vec::new();
    for kind in [ModelKind::Mlp, ModelKind::Svr, ModelKind::Knn, ModelKind::Rf, ModelKind::Hybrid] {
        let model = train(&fit_on, &ModelSpec::new(kind).with_seed(3))?;
        let mut se = 0.0;
        for (x, y) in held_out.rows().iter().zip(held_out.targets()) {
            se += (model.predict_values(x)? - y).powi(2);
        }
        let rmse = (se / held_out.len() as f64).sqrt();
        println!("{kind:>6}: held-out RMSE {rmse:6.2} umol/L");
        out.push((kind, rmse));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("training runs");
}
