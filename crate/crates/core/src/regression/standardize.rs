use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-feature centering and scaling learned from training rows. Uses the
/// sample (n - 1) standard deviation; constant features map to 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    /// 0 marks a constant feature.
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::EmptyInput("standardizer needs at least 2 rows"));
        }
        let d = rows[0].len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for r in rows {
            for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .into_iter()
            .zip(&mean)
            .map(|(s, m)| {
                let sd = (s / (n - 1.0)).sqrt();
                // spread at round-off level of the mean counts as constant
                if sd <= 1e-12 * m.abs().max(1e-300) { 0.0 } else { sd }
            })
            .collect();
        Ok(Self { mean, std })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| if *s == 0.0 { 0.0 } else { (v - m) / s })
            .collect()
    }

    pub fn apply_all(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.apply(r)).collect()
    }
}

pub fn standardize_fit(rows: &[Vec<f64>]) -> Result<Standardizer> {
    Standardizer::fit(rows)
}

pub fn standardize_apply(standardizer: &Standardizer, x: &[f64]) -> Vec<f64> {
    standardizer.apply(x)
}
