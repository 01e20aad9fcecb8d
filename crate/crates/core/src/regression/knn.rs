use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self { k: 5 }
    }
}

/// Uniform-weight k-nearest-neighbour regressor over stored (standardized) rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub rows: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl KnnModel {
    pub fn fit(rows: &[Vec<f64>], targets: &[f64], params: &KnnParams) -> Result<Self> {
        if params.k == 0 || params.k > rows.len() {
            return Err(Error::BadHyperparameter(format!(
                "k = {} needs 1 <= k <= {} rows",
                params.k,
                rows.len()
            )));
        }
        Ok(Self {
            k: params.k,
            rows: rows.to_vec(),
            targets: targets.to_vec(),
        })
    }

    /// Indices of the k nearest rows by Euclidean distance; equal distances
    /// keep the lower row index first.
    pub fn neighbors(&self, x: &[f64]) -> Vec<usize> {
        let mut dist: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        dist.truncate(self.k);
        dist.into_iter().map(|(_, i)| i).collect()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let nn = self.neighbors(x);
        nn.iter().map(|&i| self.targets[i]).sum::<f64>() / nn.len() as f64
    }
}
