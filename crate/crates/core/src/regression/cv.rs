//! k-fold partitions, out-of-fold prediction and subsampling.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::TrainingSet;
use super::model::{train, ModelSpec};
use crate::error::{Error, Result};
use crate::seed;

/// Smallest subset `resample_fraction` hands out.
pub const MIN_SUBSET: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub fold_of: Vec<usize>,
}

impl FoldAssignment {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] != fold).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &f in &self.fold_of {
            s[f] += 1;
        }
        s
    }
}

/// Random permutation cut into `k` contiguous chunks whose sizes differ by at most one.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::BadHyperparameter(format!("k = {k} folds, need >= 2")));
    }
    if n < k {
        return Err(Error::BadHyperparameter(format!("{n} rows cannot fill {k} folds")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / k, n % k);
    let mut fold_of = vec![0; n];
    let mut pos = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        for &row in &perm[pos..pos + size] {
            fold_of[row] = f;
        }
        pos += size;
    }
    Ok(FoldAssignment { k, fold_of })
}

/// Runs `fit_predict(fold, train, test)` per fold and scatters the returned
/// predictions back to input order.
pub fn cross_validate_with<F>(ts: &TrainingSet, folds: &FoldAssignment, mut fit_predict: F) -> Result<Vec<f64>>
where
    F: FnMut(usize, &TrainingSet, &TrainingSet) -> Result<Vec<f64>>,
{
    if folds.fold_of.len() != ts.len() {
        return Err(Error::InvalidValue("fold assignment does not match the data".into()));
    }
    let mut out = vec![f64::NAN; ts.len()];
    for f in 0..folds.k {
        let test_idx = folds.test_indices(f);
        let train_set = ts.subset(&folds.train_indices(f));
        let test_set = ts.subset(&test_idx);
        let preds = fit_predict(f, &train_set, &test_set)?;
        if preds.len() != test_idx.len() {
            return Err(Error::InvalidValue("fold returned the wrong number of predictions".into()));
        }
        for (i, p) in test_idx.into_iter().zip(preds) {
            out[i] = p;
        }
    }
    Ok(out)
}

/// Out-of-fold `(truth, prediction)` for every row, in input order.
pub fn cross_validated_predictions(
    ts: &TrainingSet,
    spec: &ModelSpec,
    k: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    let folds = kfold_split(ts.len(), k, seed)?;
    cross_validated_with_folds(ts, spec, &folds)
}

pub fn cross_validated_with_folds(
    ts: &TrainingSet,
    spec: &ModelSpec,
    folds: &FoldAssignment,
) -> Result<Vec<(f64, f64)>> {
    let preds = cross_validate_with(ts, folds, |f, train_set, test_set| {
        let mut s = spec.clone();
        s.seed = seed::derive_indexed(spec.seed, "fold", f as u64);
        let model = train(train_set, &s)?;
        test_set.rows().iter().map(|x| model.predict_values(x)).collect()
    })?;
    Ok(ts.targets().iter().copied().zip(preds).collect())
}

/// Sorted row indices of a uniform subset of `round(fraction * n)` rows.
pub fn resample_indices(n: usize, fraction: f64, seed: u64) -> Result<Vec<usize>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::BadRange(format!("fraction {fraction} outside (0, 1]")));
    }
    let m = (fraction * n as f64).round() as usize;
    if m < MIN_SUBSET {
        return Err(Error::SubsetTooSmall { n: m, min: MIN_SUBSET });
    }
    if m == n {
        return Ok((0..n).collect());
    }
    let mut idx = sample(&mut ChaCha8Rng::seed_from_u64(seed), n, m).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

/// Subset of `items` keeping their original order.
pub fn resample_fraction<T: Clone>(items: &[T], fraction: f64, seed: u64) -> Result<Vec<T>> {
    Ok(resample_indices(items.len(), fraction, seed)?
        .into_iter()
        .map(|i| items[i].clone())
        .collect())
}
