use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::curve::LearningCurve;
use super::stats::{agreement, prediction_band_95, roc, AgreementReport, PredictionBand, RocReport};
use crate::error::Result;
use crate::regression::{cross_validated_predictions, FeatureMode, ModelKind, ModelSpec, TrainingSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub mode: FeatureMode,
    pub model: ModelKind,
    pub folds: usize,
    pub seed: u64,
    pub agreement: AgreementReport,
    pub roc: RocReport,
    pub band: PredictionBand,
    /// Out-of-fold `(truth, prediction)` in dataset order.
    pub predictions: Vec<(f64, f64)>,
}

impl EvaluationReport {
    pub fn from_pairs(
        mode: FeatureMode,
        model: ModelKind,
        folds: usize,
        seed: u64,
        threshold: f64,
        predictions: Vec<(f64, f64)>,
    ) -> Result<Self> {
        Ok(Self {
            mode,
            model,
            folds,
            seed,
            agreement: agreement(&predictions)?,
            roc: roc(&predictions, threshold)?,
            band: prediction_band_95(&predictions)?,
            predictions,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Cross-validates `spec` on `ts` and collects every agreement statistic.
pub fn evaluate(ts: &TrainingSet, spec: &ModelSpec, folds: usize, threshold: f64) -> Result<EvaluationReport> {
    let pairs = cross_validated_predictions(ts, spec, folds, spec.seed)?;
    EvaluationReport::from_pairs(ts.mode(), spec.kind, folds, spec.seed, threshold, pairs)
}

pub const CURVE_CSV_HEADER: &str = "mode,fraction,n,r,md,std_md";

/// One row per (fraction, mode), SAL first.
pub fn curve_csv(curve: &LearningCurve) -> String {
    let mut out = String::from(CURVE_CSV_HEADER);
    out.push('\n');
    for p in &curve.points {
        for (mode, m) in [(FeatureMode::Sal, p.sal), (FeatureMode::Rgbl, p.rgbl)] {
            let _ = writeln!(out, "{mode},{},{},{},{},{}", p.fraction, p.n, m.r, m.md, m.std_md);
        }
    }
    out
}
