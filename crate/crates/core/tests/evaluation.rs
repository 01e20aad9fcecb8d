use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use statrs::function::gamma::ln_gamma;

use speccam::evaluation::{
    bland_altman, curve_csv, default_fractions, evaluate, learning_curve, pearson,
    prediction_band_95, roc, spectral_rmse, stability_summary, CurveMetrics, CurveOptions,
};
use speccam::evaluation::fraction_seeds;
use speccam::phantom::{generate_dataset, DatasetOptions};
use speccam::regression::{
    cross_validated_predictions, FeatureMode, ModelKind, ModelSpec, SpectrumFeatures, TrainingSet,
};
use speccam::spectral::{default_grid, Spectrum};
use speccam::Error;

fn random_pairs(n: usize, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| {
            let t = rng.random_range(0.0..60.0);
            (t, 0.7 * t + rng.random_range(-20.0..20.0))
        })
        .collect()
}

/// Two-tailed p of Student's t by composite Simpson on the density.
fn t_two_tailed_by_quadrature(t: f64, nu: f64) -> f64 {
    let ln_c = ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0) - 0.5 * (nu * std::f64::consts::PI).ln();
    let pdf = |x: f64| (ln_c - (nu + 1.0) / 2.0 * (1.0 + x * x / nu).ln()).exp();
    let b = t.abs();
    let n = 200_000;
    let h = b / n as f64;
    let mut s = pdf(0.0) + pdf(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * pdf(i as f64 * h);
    }
    1.0 - 2.0 * s * h / 3.0
}

#[test]
fn pearson_against_moments_and_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let pairs = random_pairs(10, &mut rng);
        let n = 10.0;
        let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
        let cov = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / (n - 1.0);
        let sx = (pairs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let sy = (pairs.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let r_oracle = cov / (sx * sy);
        let (r, p) = pearson(&pairs).unwrap();
        assert!((r - r_oracle).abs() < 1e-12);
        let t = r * ((n - 2.0) / (1.0 - r * r)).sqrt();
        let p_oracle = t_two_tailed_by_quadrature(t, n - 2.0);
        assert!((p - p_oracle).abs() < 1e-8, "p {p} vs {p_oracle}");
    }
}

#[test]
fn pearson_edge_cases() {
    let xs = [1.0, 4.0, 2.5, 9.0, 3.3];
    let same: Vec<_> = xs.iter().map(|&x| (x, x)).collect();
    let (r, p) = pearson(&same).unwrap();
    assert!((r - 1.0).abs() < 1e-15 && p < 1e-12);
    let flipped: Vec<_> = xs.iter().map(|&x| (x, -x)).collect();
    assert!((pearson(&flipped).unwrap().0 + 1.0).abs() < 1e-15);
    let flat: Vec<_> = xs.iter().map(|&x| (x, 2.0)).collect();
    assert!(matches!(pearson(&flat).unwrap_err(), Error::UndefinedCorrelation));
}

#[test]
fn bland_altman_against_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in [2, 5, 17, 50] {
        let pairs = random_pairs(n, &mut rng);
        let d: Vec<f64> = pairs.iter().map(|(t, p)| p - t).collect();
        let md = d.iter().sum::<f64>() / n as f64;
        let sd = (d.iter().map(|x| (x - md).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        let ba = bland_altman(&pairs).unwrap();
        assert!((ba.md - md).abs() < 1e-12);
        assert!((ba.std_md - sd).abs() < 1e-12);
        assert!((ba.loa_upper - (md + 1.96 * sd)).abs() < 1e-12);
        assert!((ba.loa_lower - (md - 1.96 * sd)).abs() < 1e-12);
    }
    let same = [(3.0, 3.0), (5.0, 5.0), (8.0, 8.0)];
    let ba = bland_altman(&same).unwrap();
    assert_eq!((ba.md, ba.loa_lower, ba.loa_upper), (0.0, 0.0, 0.0));
}

#[test]
fn auroc_against_pair_counting() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut done = 0;
    while done < 30 {
        let pairs: Vec<(f64, f64)> = (0..12)
            .map(|_| (rng.random_range(0.0..40.0), rng.random_range(0..8) as f64))
            .collect();
        let pos: Vec<f64> = pairs.iter().filter(|p| p.0 > 17.1).map(|p| p.1).collect();
        let neg: Vec<f64> = pairs.iter().filter(|p| p.0 <= 17.1).map(|p| p.1).collect();
        if pos.is_empty() || neg.is_empty() {
            assert!(matches!(roc(&pairs, 17.1).unwrap_err(), Error::DegenerateRoc));
            continue;
        }
        done += 1;
        let mut wins = 0.0;
        for a in &pos {
            for b in &neg {
                wins += if a > b { 1.0 } else if a == b { 0.5 } else { 0.0 };
            }
        }
        let oracle = wins / (pos.len() * neg.len()) as f64;
        let report = roc(&pairs, 17.1).unwrap();
        assert!((report.auroc - oracle).abs() < 1e-12);
        assert!(report.points.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));
        assert_eq!(report.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(report.points.last(), Some(&(1.0, 1.0)));
    }
}

#[test]
fn auroc_extremes() {
    let ordered = [(5.0, 1.0), (10.0, 2.0), (30.0, 3.0), (40.0, 4.0)];
    assert_eq!(roc(&ordered, 17.1).unwrap().auroc, 1.0);
    let tied = [(5.0, 1.0), (10.0, 1.0), (30.0, 1.0), (40.0, 1.0)];
    assert_eq!(roc(&tied, 17.1).unwrap().auroc, 0.5);
}

#[test]
fn prediction_band_coverage() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let noise = Normal::new(0.0, 2.0).unwrap();
    let draws = 1000;
    let mut inside = 0;
    for _ in 0..draws {
        let pairs: Vec<(f64, f64)> = (0..10)
            .map(|_| {
                let x = rng.random_range(0.0..10.0);
                (x, 2.0 + 3.0 * x + noise.sample(&mut rng))
            })
            .collect();
        let band = prediction_band_95(&pairs).unwrap();
        let x0 = rng.random_range(0.0..10.0);
        let y0 = 2.0 + 3.0 * x0 + noise.sample(&mut rng);
        let (lo, hi) = band.at(x0);
        if (lo..=hi).contains(&y0) {
            inside += 1;
        }
    }
    let coverage = inside as f64 / draws as f64;
    assert!((0.92..=0.98).contains(&coverage), "coverage {coverage}");
}

#[test]
fn band_shape_and_errors() {
    let exact: Vec<(f64, f64)> = (0..8).map(|i| (i as f64, i as f64)).collect();
    let band = prediction_band_95(&exact).unwrap();
    assert!(band.half_width(3.5) < 1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pairs = random_pairs(20, &mut rng);
    let band = prediction_band_95(&pairs).unwrap();
    let w0 = band.half_width(band.mean_x);
    for step in 1..10 {
        let d = step as f64 * 3.0;
        assert!(band.half_width(band.mean_x + d) > w0);
        assert!(band.half_width(band.mean_x + d) > band.half_width(band.mean_x + d - 3.0));
    }
    let flat = [(1.0, 2.0), (1.0, 3.0), (1.0, 5.0), (1.0, 4.0)];
    assert!(matches!(prediction_band_95(&flat).unwrap_err(), Error::UndefinedRegression));
}

#[test]
fn spectral_rmse_against_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let a = Spectrum::new(default_grid(), (0..27).map(|_| rng.random_range(0.0..1.0)).collect()).unwrap();
    let b = Spectrum::new(default_grid(), (0..27).map(|_| rng.random_range(0.0..1.0)).collect()).unwrap();
    let mut s = 0.0;
    for i in 0..27 {
        s += (a.values()[i] - b.values()[i]).powi(2);
    }
    assert!((spectral_rmse(&a, &b).unwrap() - (s / 27.0).sqrt()).abs() < 1e-15);
    assert_eq!(spectral_rmse(&a, &a).unwrap(), 0.0);
    let shifted = Spectrum::new(default_grid(), a.values().iter().map(|v| v + 0.1).collect()).unwrap();
    assert!((spectral_rmse(&shifted, &a).unwrap() - 0.1).abs() < 1e-12);
}

fn small_sets(n: usize) -> (TrainingSet, TrainingSet) {
    let ds = generate_dataset(n, &DatasetOptions::default(), 3).unwrap();
    (
        TrainingSet::from_records(&ds.records, FeatureMode::Sal, SpectrumFeatures::Raw).unwrap(),
        TrainingSet::from_records(&ds.records, FeatureMode::Rgbl, SpectrumFeatures::Raw).unwrap(),
    )
}

#[test]
fn full_fraction_curve_is_plain_cv() {
    let (sal, rgbl) = small_sets(60);
    let spec = ModelSpec::new(ModelKind::Knn).with_seed(8);
    let options = CurveOptions {
        fractions: vec![1.0],
        folds: 10,
        seed: 21,
        repeats: 1,
    };
    let curve = learning_curve(&sal, &rgbl, &spec, &spec, &options).unwrap();
    let (_, fold_seed) = fraction_seeds(21, 0, 0);
    for (ts, got) in [(&sal, curve.points[0].sal), (&rgbl, curve.points[0].rgbl)] {
        let pairs = cross_validated_predictions(ts, &spec, 10, fold_seed).unwrap();
        assert_eq!(got, CurveMetrics::from_pairs(&pairs).unwrap());
    }
    assert_eq!(curve.points[0].n, 60);
    assert_eq!(curve.points[0].ids, sal.ids());
}

#[test]
fn identical_features_give_identical_series() {
    let (sal, _) = small_sets(80);
    let spec = ModelSpec::new(ModelKind::Rf);
    let options = CurveOptions {
        fractions: vec![0.25, 0.5, 1.0],
        ..CurveOptions::default()
    };
    let curve = learning_curve(&sal, &sal, &spec, &spec, &options).unwrap();
    assert_eq!(curve.series(FeatureMode::Sal), curve.series(FeatureMode::Rgbl));
    for p in &curve.points {
        assert_eq!(p.ids.len(), p.n);
    }
    let csv = curve_csv(&curve);
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
    assert!(csv.starts_with("mode,fraction,n,r,md,std_md\n"));
}

#[test]
fn curve_requires_matching_records() {
    let (sal, rgbl) = small_sets(60);
    let other = rgbl.subset(&(0..59).collect::<Vec<_>>());
    let spec = ModelSpec::new(ModelKind::Knn);
    let options = CurveOptions {
        fractions: vec![1.0],
        ..CurveOptions::default()
    };
    assert!(learning_curve(&sal, &other, &spec, &spec, &options).is_err());
    // 0.125 of 60 leaves fewer than two rows per fold
    let options = CurveOptions::default();
    assert!(matches!(
        learning_curve(&sal, &rgbl, &spec, &spec, &options).unwrap_err(),
        Error::SubsetTooSmall { .. }
    ));
}

#[test]
fn default_fraction_grid() {
    let f = default_fractions();
    assert_eq!(f.len(), 15);
    assert_eq!(f[0], 0.125);
    assert_eq!(*f.last().unwrap(), 1.0);
    assert!(f.windows(2).all(|w| (w[1] - w[0] - 0.0625).abs() < 1e-12));
}

#[test]
fn stability_needs_two_points() {
    let (sal, rgbl) = small_sets(60);
    let spec = ModelSpec::new(ModelKind::Knn);
    let options = CurveOptions {
        fractions: vec![1.0],
        ..CurveOptions::default()
    };
    let curve = learning_curve(&sal, &rgbl, &spec, &spec, &options).unwrap();
    assert!(stability_summary(&curve).is_err());
}

#[test]
fn evaluation_report_is_complete() {
    let (sal, _) = small_sets(60);
    let report = evaluate(&sal, &ModelSpec::new(ModelKind::Knn), 10, 17.1).unwrap();
    assert_eq!(report.predictions.len(), 60);
    let a = &report.agreement;
    assert!(a.r.abs() <= 1.0);
    assert!((a.loa_upper - a.loa_lower - 2.0 * 1.96 * a.std_md).abs() < 1e-12);
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    for key in ["agreement", "roc", "band", "predictions"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}
