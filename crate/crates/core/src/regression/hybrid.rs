//! Linear combination of the four base learners.

use super::cv::kfold_split;
use super::features::TrainingSet;
use super::model::{train_base, HybridModel, HybridWeighting, ModelKind, ModelSpec};
use super::standardize::Standardizer;
use crate::error::{Error, Result};
use crate::seed;

fn base_spec(spec: &ModelSpec, kind: ModelKind) -> ModelSpec {
    let mut s = spec.clone().with_kind(kind);
    s.seed = seed::derive_seed(spec.seed, kind.label());
    s
}

pub(crate) fn fit(
    ts: &TrainingSet,
    spec: &ModelSpec,
    standardizer: &Standardizer,
    z: &[Vec<f64>],
) -> Result<HybridModel> {
    let bases = ModelKind::BASES
        .iter()
        .map(|&k| train_base(ts, &base_spec(spec, k), standardizer, z))
        .collect::<Result<Vec<_>>>()?;
    let weights = match spec.hybrid.weighting {
        HybridWeighting::Equal => vec![0.25; 4],
        HybridWeighting::Stacked => stacked_weights(ts, spec, standardizer, z)?,
    };
    Ok(HybridModel { weights, bases })
}

/// Inner k-fold out-of-fold predictions of every base, then NNLS.
fn stacked_weights(
    ts: &TrainingSet,
    spec: &ModelSpec,
    standardizer: &Standardizer,
    z: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let k = spec.hybrid.inner_folds;
    let folds = kfold_split(ts.len(), k, seed::derive_seed(spec.seed, "stacking"))?;
    let mut oof = vec![vec![0.0; ModelKind::BASES.len()]; ts.len()];
    for f in 0..k {
        let train_idx = folds.train_indices(f);
        let test_idx = folds.test_indices(f);
        let inner = ts.subset(&train_idx);
        let inner_z: Vec<Vec<f64>> = train_idx.iter().map(|&i| z[i].clone()).collect();
        for (b, &kind) in ModelKind::BASES.iter().enumerate() {
            let mut s = base_spec(spec, kind);
            s.seed = seed::derive_indexed(s.seed, "inner-fold", f as u64);
            let model = train_base(&inner, &s, standardizer, &inner_z)?;
            for &i in &test_idx {
                oof[i][b] = model.predict_values(&ts.rows()[i])?;
            }
        }
    }
    fit_stacked_weights(&oof, ts.targets())
}

/// Non-negative least squares `min ||P w - y||` with `w >= 0`, solved
/// exactly by checking every active set (the base count is tiny).
/// `predictions[i]` holds every base's prediction for sample `i`.
pub fn fit_stacked_weights(predictions: &[Vec<f64>], targets: &[f64]) -> Result<Vec<f64>> {
    let m = predictions.first().map_or(0, Vec::len);
    if m == 0 || m > 16 || predictions.len() != targets.len() {
        return Err(Error::InvalidValue("stacking needs 1..=16 aligned base columns".into()));
    }
    let residual = |w: &[f64]| -> f64 {
        predictions
            .iter()
            .zip(targets)
            .map(|(p, y)| {
                let e = p.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() - y;
                e * e
            })
            .sum()
    };
    let mut best_w = vec![0.0; m];
    let mut best_r = residual(&best_w);
    for mask in 1u32..(1 << m) {
        let cols: Vec<usize> = (0..m).filter(|c| mask & (1 << c) != 0).collect();
        let k = cols.len();
        // normal equations restricted to the active columns
        let mut a = vec![vec![0.0; k + 1]; k];
        for (p, y) in predictions.iter().zip(targets) {
            for (r, &cr) in cols.iter().enumerate() {
                for (c, &cc) in cols.iter().enumerate() {
                    a[r][c] += p[cr] * p[cc];
                }
                a[r][k] += p[cr] * y;
            }
        }
        let Some(sol) = solve_dense(a) else { continue };
        if sol.iter().any(|&v| v < 0.0) {
            continue;
        }
        let mut w = vec![0.0; m];
        for (&c, v) in cols.iter().zip(sol) {
            w[c] = v;
        }
        let r = residual(&w);
        if r < best_r {
            best_r = r;
            best_w = w;
        }
    }
    Ok(best_w)
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_dense(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    let scale = a.iter().flat_map(|r| r[..n].iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..=n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (a[r][n] - s) / a[r][r];
    }
    Some(x)
}
