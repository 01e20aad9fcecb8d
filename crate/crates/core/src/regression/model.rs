use std::path::Path;

use serde::{Deserialize, Serialize};

use super::features::{FeatureMode, FeatureVector, TrainingSet};
use super::forest::{Forest, RfParams};
use super::knn::{KnnModel, KnnParams};
use super::mlp::{self, MlpModel, MlpParams};
use super::standardize::Standardizer;
use super::svr::{self, SvrModel, SvrParams};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Mlp,
    Svr,
    Knn,
    Rf,
    Hybrid,
}

impl ModelKind {
    pub const BASES: [ModelKind; 4] = [ModelKind::Mlp, ModelKind::Svr, ModelKind::Knn, ModelKind::Rf];

    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Mlp => "ann",
            ModelKind::Svr => "svr",
            ModelKind::Knn => "knn",
            ModelKind::Rf => "rf",
            ModelKind::Hybrid => "hybrid",
        }
    }

    /// Smallest training set the learner accepts.
    pub fn min_rows(self, spec: &ModelSpec) -> usize {
        match self {
            ModelKind::Mlp => 10,
            ModelKind::Svr => 2,
            ModelKind::Knn => spec.knn.k.max(1),
            ModelKind::Rf => 5,
            ModelKind::Hybrid => 20,
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.label())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ann" | "mlp" => Ok(ModelKind::Mlp),
            "svr" | "svm" => Ok(ModelKind::Svr),
            "knn" => Ok(ModelKind::Knn),
            "rf" => Ok(ModelKind::Rf),
            "hybrid" => Ok(ModelKind::Hybrid),
            other => Err(Error::InvalidValue(format!("unknown model '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum HybridWeighting {
    /// One quarter each.
    #[default]
    Equal,
    /// Non-negative least squares on inner out-of-fold predictions.
    Stacked,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridParams {
    pub weighting: HybridWeighting,
    pub inner_folds: usize,
}

impl Default for HybridParams {
    fn default() -> Self {
        Self {
            weighting: HybridWeighting::Equal,
            inner_folds: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub mlp: MlpParams,
    pub svr: SvrParams,
    pub knn: KnnParams,
    pub rf: RfParams,
    pub hybrid: HybridParams,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind) -> Self {
        Self {
            kind,
            mlp: MlpParams::default(),
            svr: SvrParams::default(),
            knn: KnnParams::default(),
            rf: RfParams::default(),
            hybrid: HybridParams::default(),
            seed: 42,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_kind(mut self, kind: ModelKind) -> Self {
        self.kind = kind;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridModel {
    pub weights: Vec<f64>,
    pub bases: Vec<TrainedModel>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Learned {
    Mlp(MlpModel),
    Svr(SvrModel),
    Knn(KnnModel),
    Rf(Forest),
    Hybrid(HybridModel),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub spec: ModelSpec,
    pub mode: FeatureMode,
    pub dimension: usize,
    pub standardizer: Standardizer,
    pub learned: Learned,
}

impl TrainedModel {
    /// Prediction from raw (unstandardized) feature values.
    pub fn predict_values(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension {
            return Err(Error::FeatureModeMismatch {
                expected: format!("{} features", self.dimension),
                found: format!("{} features", x.len()),
            });
        }
        Ok(self.predict_standardized(&self.standardizer.apply(x)))
    }

    fn predict_standardized(&self, z: &[f64]) -> f64 {
        match &self.learned {
            Learned::Mlp(m) => m.predict(z),
            Learned::Svr(m) => m.predict(z),
            Learned::Knn(m) => m.predict(z),
            Learned::Rf(m) => m.predict(z),
            Learned::Hybrid(h) => h
                .weights
                .iter()
                .zip(&h.bases)
                .map(|(w, b)| w * b.predict_standardized(z))
                .sum(),
        }
    }

    /// Base-model predictions of a hybrid, in [`ModelKind::BASES`] order.
    pub fn base_predictions(&self, x: &[f64]) -> Result<Vec<f64>> {
        match &self.learned {
            Learned::Hybrid(h) => h.bases.iter().map(|b| b.predict_values(x)).collect(),
            _ => Ok(vec![self.predict_values(x)?]),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::format("model file", e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::calibration::write_atomic(path, self.to_json().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

pub fn predict(model: &TrainedModel, x: &FeatureVector) -> Result<f64> {
    if x.mode() != model.mode {
        return Err(Error::FeatureModeMismatch {
            expected: model.mode.to_string(),
            found: x.mode().to_string(),
        });
    }
    model.predict_values(x.values())
}

fn check_rows(ts: &TrainingSet, spec: &ModelSpec) -> Result<()> {
    let min = spec.kind.min_rows(spec);
    if ts.len() < min {
        return Err(Error::SubsetTooSmall { n: ts.len(), min });
    }
    Ok(())
}

pub fn train(ts: &TrainingSet, spec: &ModelSpec) -> Result<TrainedModel> {
    check_rows(ts, spec)?;
    let standardizer = Standardizer::fit(ts.rows())?;
    let z = standardizer.apply_all(ts.rows());
    train_standardized(ts, spec, standardizer, &z)
}

fn train_standardized(
    ts: &TrainingSet,
    spec: &ModelSpec,
    standardizer: Standardizer,
    z: &[Vec<f64>],
) -> Result<TrainedModel> {
    check_rows(ts, spec)?;
    let y = ts.targets();
    let learned = match spec.kind {
        ModelKind::Mlp => Learned::Mlp(mlp::fit(z, y, &spec.mlp, seed::derive_seed(spec.seed, "mlp"))?),
        ModelKind::Svr => Learned::Svr(svr::solve(z, y, &spec.svr)?.model),
        ModelKind::Knn => Learned::Knn(KnnModel::fit(z, y, &spec.knn)?),
        ModelKind::Rf => Learned::Rf(Forest::fit(z, y, &spec.rf, seed::derive_seed(spec.seed, "rf"))?),
        ModelKind::Hybrid => Learned::Hybrid(super::hybrid::fit(ts, spec, &standardizer, z)?),
    };
    Ok(TrainedModel {
        spec: spec.clone(),
        mode: ts.mode(),
        dimension: ts.dimension(),
        standardizer,
        learned,
    })
}

/// Trains a base learner on rows standardized by a shared standardizer.
pub(crate) fn train_base(
    ts: &TrainingSet,
    spec: &ModelSpec,
    standardizer: &Standardizer,
    z: &[Vec<f64>],
) -> Result<TrainedModel> {
    train_standardized(ts, spec, standardizer.clone(), z)
}

pub fn train_mlp(ts: &TrainingSet, spec: &ModelSpec) -> Result<TrainedModel> {
    train(ts, &spec.clone().with_kind(ModelKind::Mlp))
}

pub fn train_svr(ts: &TrainingSet, spec: &ModelSpec) -> Result<TrainedModel> {
    train(ts, &spec.clone().with_kind(ModelKind::Svr))
}

pub fn train_knn(ts: &TrainingSet, spec: &ModelSpec) -> Result<TrainedModel> {
    train(ts, &spec.clone().with_kind(ModelKind::Knn))
}

pub fn train_rf(ts: &TrainingSet, spec: &ModelSpec) -> Result<TrainedModel> {
    train(ts, &spec.clone().with_kind(ModelKind::Rf))
}

pub fn train_hybrid(ts: &TrainingSet, spec: &ModelSpec) -> Result<TrainedModel> {
    train(ts, &spec.clone().with_kind(ModelKind::Hybrid))
}
