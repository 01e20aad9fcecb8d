use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phantom::DatasetRecord;
use crate::spectral::normalize_at;

/// Which part of a record feeds the learner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    /// Spectrally augmented: the 27-band reflectance spectrum.
    Sal,
    /// The raw RGB triple.
    Rgbl,
}

impl FeatureMode {
    pub fn dimension(self) -> usize {
        match self {
            FeatureMode::Sal => crate::spectral::DEFAULT_BAND_COUNT,
            FeatureMode::Rgbl => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FeatureMode::Sal => "sal",
            FeatureMode::Rgbl => "rgbl",
        }
    }
}

impl std::fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.label())
    }
}

impl std::str::FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sal" => Ok(FeatureMode::Sal),
            "rgbl" | "rgb" => Ok(FeatureMode::Rgbl),
            other => Err(Error::InvalidValue(format!("unknown feature mode '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    mode: FeatureMode,
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(mode: FeatureMode, values: Vec<f64>) -> Result<Self> {
        if values.len() != mode.dimension() {
            return Err(Error::InvalidValue(format!(
                "{mode} features have {} values, got {}",
                mode.dimension(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidValue("non-finite feature".into()));
        }
        Ok(Self { mode, values })
    }

    pub fn mode(&self) -> FeatureMode {
        self.mode
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// How spectra are turned into SAL features.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumFeatures {
    #[default]
    Raw,
    /// Divided by the 680 nm reflectance.
    Normalized680,
}

pub fn record_features(
    record: &DatasetRecord,
    mode: FeatureMode,
    spectra: SpectrumFeatures,
) -> Result<FeatureVector> {
    let values = match (mode, spectra) {
        (FeatureMode::Rgbl, _) => record.rgb.to_array().to_vec(),
        (FeatureMode::Sal, SpectrumFeatures::Raw) => record.spectrum.values().to_vec(),
        (FeatureMode::Sal, SpectrumFeatures::Normalized680) => {
            normalize_at(&record.spectrum, 680.0)?.into_values()
        }
    };
    FeatureVector::new(mode, values)
}

/// Feature rows with their targets. Row `i` keeps the caller's id `ids[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet {
    mode: FeatureMode,
    rows: Vec<Vec<f64>>,
    targets: Vec<f64>,
    ids: Vec<usize>,
}

impl TrainingSet {
    pub fn new(mode: FeatureMode, rows: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        let ids = (0..rows.len()).collect();
        Self::with_ids(mode, rows, targets, ids)
    }

    /// Free-dimension set for ad-hoc learners; `mode` only labels it.
    pub fn with_ids(
        mode: FeatureMode,
        rows: Vec<Vec<f64>>,
        targets: Vec<f64>,
        ids: Vec<usize>,
    ) -> Result<Self> {
        if rows.len() != targets.len() || rows.len() != ids.len() {
            return Err(Error::InvalidValue(
                "rows, targets and ids differ in length".into(),
            ));
        }
        if let Some(first) = rows.first() {
            if first.is_empty() || rows.iter().any(|r| r.len() != first.len()) {
                return Err(Error::InvalidValue("feature rows differ in length".into()));
            }
        }
        if rows.iter().flatten().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::InvalidValue("non-finite training value".into()));
        }
        Ok(Self {
            mode,
            rows,
            targets,
            ids,
        })
    }

    pub fn from_records(
        records: &[DatasetRecord],
        mode: FeatureMode,
        spectra: SpectrumFeatures,
    ) -> Result<Self> {
        let rows = records
            .iter()
            .map(|r| Ok(record_features(r, mode, spectra)?.values))
            .collect::<Result<Vec<_>>>()?;
        let targets = records.iter().map(|r| r.bbl).collect();
        let ids = records.iter().map(|r| r.id).collect();
        Self::with_ids(mode, rows, targets, ids)
    }

    pub fn mode(&self) -> FeatureMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            mode: self.mode,
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            targets: indices.iter().map(|&i| self.targets[i]).collect(),
            ids: indices.iter().map(|&i| self.ids[i]).collect(),
        }
    }
}
