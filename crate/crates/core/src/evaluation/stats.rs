use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::spectral::Spectrum;

/// Positive-class cutoff for ROC analysis, µmol/L (1 mg/dL).
pub const DEFAULT_ROC_THRESHOLD: f64 = 17.1;

/// Multiplier for the limits of agreement.
pub const LOA_Z: f64 = 1.96;

fn check_pairs(pairs: &[(f64, f64)], min: usize, what: &str) -> Result<()> {
    if pairs.len() < min {
        return Err(Error::InvalidValue(format!(
            "{what} needs at least {min} pairs, got {}",
            pairs.len()
        )));
    }
    if pairs.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(Error::InvalidValue(format!("{what}: non-finite pair")));
    }
    Ok(())
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation with the n-1 denominator; 0 for fewer than two values.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Two-tailed p-value of Student's t with `dof` degrees of freedom.
pub fn t_two_tailed_p(t: f64, dof: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    beta_reg(dof / 2.0, 0.5, dof / (dof + t * t))
}

/// Upper `q` quantile of Student's t.
pub fn t_quantile(q: f64, dof: f64) -> f64 {
    StudentsT::new(0.0, 1.0, dof)
        .expect("positive degrees of freedom")
        .inverse_cdf(q)
}

/// Sample Pearson correlation of `(truth, prediction)` and its two-tailed p-value.
pub fn pearson(pairs: &[(f64, f64)]) -> Result<(f64, f64)> {
    check_pairs(pairs, 3, "correlation")?;
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let dof = n - 2.0;
    let p = if r.abs() == 1.0 {
        0.0
    } else {
        t_two_tailed_p(r * (dof / (1.0 - r * r)).sqrt(), dof)
    };
    Ok((r, p))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub n: usize,
    pub r: f64,
    pub p_value: f64,
    pub md: f64,
    pub std_md: f64,
    pub loa_upper: f64,
    pub loa_lower: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlandAltman {
    pub md: f64,
    pub std_md: f64,
    pub loa_upper: f64,
    pub loa_lower: f64,
}

/// Differences are prediction minus truth.
pub fn bland_altman(pairs: &[(f64, f64)]) -> Result<BlandAltman> {
    check_pairs(pairs, 2, "Bland-Altman")?;
    let d: Vec<f64> = pairs.iter().map(|(t, p)| p - t).collect();
    let md = mean(&d);
    let std_md = sample_std(&d);
    Ok(BlandAltman {
        md,
        std_md,
        loa_upper: md + LOA_Z * std_md,
        loa_lower: md - LOA_Z * std_md,
    })
}

pub fn agreement(pairs: &[(f64, f64)]) -> Result<AgreementReport> {
    let (r, p_value) = pearson(pairs)?;
    let ba = bland_altman(pairs)?;
    Ok(AgreementReport {
        n: pairs.len(),
        r,
        p_value,
        md: ba.md,
        std_md: ba.std_md,
        loa_upper: ba.loa_upper,
        loa_lower: ba.loa_lower,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocReport {
    pub threshold: f64,
    pub positives: usize,
    pub negatives: usize,
    /// `(fpr, tpr)` from (0, 0) to (1, 1).
    pub points: Vec<(f64, f64)>,
    pub auroc: f64,
}

/// ROC of prediction scores against `truth > threshold`.
pub fn roc(pairs: &[(f64, f64)], threshold: f64) -> Result<RocReport> {
    check_pairs(pairs, 1, "ROC")?;
    let labels: Vec<bool> = pairs.iter().map(|(t, _)| *t > threshold).collect();
    let scores: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    roc_from_labels(&labels, &scores, threshold)
}

pub(crate) fn roc_from_labels(labels: &[bool], scores: &[f64], threshold: f64) -> Result<RocReport> {
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::DegenerateRoc);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auroc = 0.0;
    let mut i = 0;
    while i < order.len() {
        // every score tied with this one crosses the cutoff together
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let (x0, y0) = *points.last().unwrap();
        let (x1, y1) = (fp as f64 / negatives as f64, tp as f64 / positives as f64);
        auroc += (x1 - x0) * (y0 + y1) / 2.0;
        points.push((x1, y1));
    }
    Ok(RocReport {
        threshold,
        positives,
        negatives,
        points,
        auroc,
    })
}

/// 95% prediction band around the least-squares line of prediction on truth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionBand {
    pub n: usize,
    pub slope: f64,
    pub intercept: f64,
    /// Residual standard error.
    pub s: f64,
    pub mean_x: f64,
    pub sxx: f64,
    pub t: f64,
}

impl PredictionBand {
    pub fn fit(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    pub fn half_width(&self, x: f64) -> f64 {
        let n = self.n as f64;
        let dx = x - self.mean_x;
        self.t * self.s * (1.0 + 1.0 / n + dx * dx / self.sxx).sqrt()
    }

    pub fn at(&self, x: f64) -> (f64, f64) {
        let (y, h) = (self.fit(x), self.half_width(x));
        (y - h, y + h)
    }
}

pub fn prediction_band_95(pairs: &[(f64, f64)]) -> Result<PredictionBand> {
    check_pairs(pairs, 4, "prediction band")?;
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::UndefinedRegression);
    }
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pairs
        .iter()
        .map(|&(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let dof = n - 2.0;
    Ok(PredictionBand {
        n: pairs.len(),
        slope,
        intercept,
        s: (sse / dof).sqrt(),
        mean_x: mx,
        sxx,
        t: t_quantile(0.975, dof),
    })
}

/// Root mean square difference over bands.
pub fn spectral_rmse(reconstructed: &Spectrum, reference: &Spectrum) -> Result<f64> {
    if reconstructed.grid() != reference.grid() {
        return Err(Error::GridMismatch);
    }
    let a = reconstructed.values();
    let b = reference.values();
    Ok((a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64).sqrt())
}

/// Ordinary least squares `y = a + b x` with its coefficient of determination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidValue("linear fit needs two or more aligned points".into()));
    }
    let (mx, my) = (mean(xs), mean(ys));
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::UndefinedRegression);
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(LinearFit {
        intercept,
        slope,
        r_squared,
    })
}
