//! Learning curves over resampling fractions, SAL against RGBL.

use serde::{Deserialize, Serialize};

use super::stats::{bland_altman, pearson, sample_std};
use crate::error::{Error, Result};
use crate::regression::{cross_validated_with_folds, kfold_split, resample_indices, FeatureMode, ModelSpec, TrainingSet};
use crate::seed;

pub const DEFAULT_FROM: f64 = 0.125;
pub const DEFAULT_TO: f64 = 1.0;
pub const DEFAULT_STEP: f64 = 0.0625;

/// `from, from + step, ..., to`; the count is rounded so float drift cannot drop the last point.
pub fn fraction_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    let valid = |f: f64| f > 0.0 && f <= 1.0;
    if !valid(from) || !valid(to) || from > to {
        return Err(Error::BadRange(format!("fractions {from}..{to} must satisfy 0 < from <= to <= 1")));
    }
    if from == to {
        return Ok(vec![from]);
    }
    if !(step > 0.0) {
        return Err(Error::BadRange(format!("step {step} must be positive")));
    }
    let count = ((to - from) / step).round() as usize + 1;
    let last = from + (count - 1) as f64 * step;
    if (last - to).abs() > 1e-9 {
        return Err(Error::BadRange(format!("step {step} does not divide {from}..{to}")));
    }
    Ok((0..count)
        .map(|i| if i + 1 == count { to } else { from + i as f64 * step })
        .collect())
}

pub fn default_fractions() -> Vec<f64> {
    fraction_grid(DEFAULT_FROM, DEFAULT_TO, DEFAULT_STEP).expect("default grid is valid")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveOptions {
    pub fractions: Vec<f64>,
    pub folds: usize,
    pub seed: u64,
    /// Resamples averaged per fraction; 1 reproduces a single-run curve.
    pub repeats: usize,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self {
            fractions: default_fractions(),
            folds: 10,
            seed: 42,
            repeats: 1,
        }
    }
}

/// The three indices tracked per feature mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CurveMetrics {
    pub r: f64,
    pub md: f64,
    pub std_md: f64,
}

impl CurveMetrics {
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let (r, _) = pearson(pairs)?;
        let ba = bland_altman(pairs)?;
        Ok(Self {
            r,
            md: ba.md,
            std_md: ba.std_md,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub fraction: f64,
    pub n: usize,
    pub sal: CurveMetrics,
    pub rgbl: CurveMetrics,
    /// Record ids used at this fraction (first repeat), shared by both modes.
    pub ids: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub points: Vec<CurvePoint>,
}

impl LearningCurve {
    pub fn fractions(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.fraction).collect()
    }

    pub fn series(&self, mode: FeatureMode) -> Vec<CurveMetrics> {
        self.points
            .iter()
            .map(|p| match mode {
                FeatureMode::Sal => p.sal,
                FeatureMode::Rgbl => p.rgbl,
            })
            .collect()
    }
}

/// Seeds used for fraction `index`, repeat `repeat`: (subset, folds).
pub fn fraction_seeds(seed: u64, index: usize, repeat: usize) -> (u64, u64) {
    let base = seed::derive_indexed(seed, "fraction", index as u64);
    let base = seed::derive_indexed(base, "repeat", repeat as u64);
    (seed::derive_seed(base, "subset"), seed::derive_seed(base, "folds"))
}

/// Runs k-fold CV on the same row subset for both feature sets at every fraction.
/// `sal` and `rgbl` must describe the same records in the same order.
pub fn learning_curve(
    sal: &TrainingSet,
    rgbl: &TrainingSet,
    sal_spec: &ModelSpec,
    rgbl_spec: &ModelSpec,
    options: &CurveOptions,
) -> Result<LearningCurve> {
    if sal.ids() != rgbl.ids() || sal.targets() != rgbl.targets() {
        return Err(Error::InvalidValue("SAL and RGBL sets describe different records".into()));
    }
    if options.fractions.is_empty() || options.repeats == 0 {
        return Err(Error::BadRange("need at least one fraction and one repeat".into()));
    }
    let smallest = options.fractions.iter().cloned().fold(f64::INFINITY, f64::min);
    let n_small = (smallest * sal.len() as f64).round() as usize;
    if n_small < 2 * options.folds {
        return Err(Error::SubsetTooSmall {
            n: n_small,
            min: 2 * options.folds,
        });
    }

    let mut points = Vec::with_capacity(options.fractions.len());
    for (i, &fraction) in options.fractions.iter().enumerate() {
        let mut sums = [CurveMetrics::default(); 2];
        let mut first_ids = Vec::new();
        let mut n = 0;
        for rep in 0..options.repeats {
            let (subset_seed, fold_seed) = fraction_seeds(options.seed, i, rep);
            let idx = resample_indices(sal.len(), fraction, subset_seed)?;
            n = idx.len();
            let folds = kfold_split(n, options.folds, fold_seed)?;
            let sets = [(sal.subset(&idx), sal_spec), (rgbl.subset(&idx), rgbl_spec)];
            for (slot, (ts, spec)) in sums.iter_mut().zip(sets.iter()) {
                let m = CurveMetrics::from_pairs(&cross_validated_with_folds(ts, spec, &folds)?)?;
                slot.r += m.r;
                slot.md += m.md;
                slot.std_md += m.std_md;
            }
            if rep == 0 {
                first_ids = idx.iter().map(|&j| sal.ids()[j]).collect();
            }
        }
        let k = options.repeats as f64;
        let avg = |m: CurveMetrics| {
            if options.repeats == 1 {
                m
            } else {
                CurveMetrics {
                    r: m.r / k,
                    md: m.md / k,
                    std_md: m.std_md / k,
                }
            }
        };
        points.push(CurvePoint {
            fraction,
            n,
            sal: avg(sums[0]),
            rgbl: avg(sums[1]),
            ids: first_ids,
        });
    }
    Ok(LearningCurve { points })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilitySummary {
    pub sal: CurveMetrics,
    pub rgbl: CurveMetrics,
}

/// Sample standard deviation of each index across fractions.
pub fn stability_summary(curve: &LearningCurve) -> Result<StabilitySummary> {
    if curve.points.len() < 2 {
        return Err(Error::InvalidValue("stability needs at least two fractions".into()));
    }
    let spread = |s: Vec<CurveMetrics>| CurveMetrics {
        r: sample_std(&s.iter().map(|m| m.r).collect::<Vec<_>>()),
        md: sample_std(&s.iter().map(|m| m.md).collect::<Vec<_>>()),
        std_md: sample_std(&s.iter().map(|m| m.std_md).collect::<Vec<_>>()),
    };
    Ok(StabilitySummary {
        sal: spread(curve.series(FeatureMode::Sal)),
        rgbl: spread(curve.series(FeatureMode::Rgbl)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_fifteen_points() {
        let f = default_fractions();
        assert_eq!(f.len(), 15);
        assert_eq!(f[0], 0.125);
        assert_eq!(f[14], 1.0);
        assert!((f[1] - 0.1875).abs() < 1e-15);
    }

    #[test]
    fn grid_edges() {
        assert_eq!(fraction_grid(1.0, 1.0, 0.0625).unwrap(), vec![1.0]);
        assert!(fraction_grid(0.5, 0.25, 0.1).is_err());
        assert!(fraction_grid(0.0, 1.0, 0.1).is_err());
        assert!(fraction_grid(0.2, 1.0, 0.3).is_err());
    }

    #[test]
    fn constant_series_is_stable() {
        let m = CurveMetrics {
            r: 0.9,
            md: 1.0,
            std_md: 5.0,
        };
        let p = |f| CurvePoint {
            fraction: f,
            n: 10,
            sal: m,
            rgbl: m,
            ids: vec![],
        };
        let s = stability_summary(&LearningCurve {
            points: vec![p(0.5), p(1.0)],
        })
        .unwrap();
        assert_eq!(s.sal, CurveMetrics::default());
    }
}
