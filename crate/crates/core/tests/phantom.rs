use speccam::calibration::wiener_tm;
use speccam::evaluation::{default_chart_test, spectral_rmse};
use speccam::formats::dataset_to_csv;
use speccam::phantom::{
    bilirubin_extinction, generate_chart_scene, generate_dataset, hemoglobin_extinction,
    phantom_chart, phantom_reflectance, render_linear, render_rgb, CameraModel, DatasetOptions,
    PhantomSpec, BILIRUBIN_SCALE, PHANTOM_SERIES_MG_DL,
};
use speccam::calibration::sample_chart;
use speccam::phantom::classic_chart;
use speccam::reconstruction::reconstruct_pixel;
use speccam::spectral::{default_grid, Spectrum};
use speccam::Error;

#[test]
fn extinction_curves() {
    assert_eq!(bilirubin_extinction(460.0).unwrap(), 1.0);
    assert!(bilirubin_extinction(680.0).unwrap() < 0.01);
    assert!(hemoglobin_extinction(540.0).unwrap() >= hemoglobin_extinction(500.0).unwrap());
    assert!(matches!(bilirubin_extinction(720.0).unwrap_err(), Error::BandNotFound(_)));
}

#[test]
fn reflectance_at_460_falls_along_the_series() {
    let r: Vec<f64> = PHANTOM_SERIES_MG_DL
        .iter()
        .map(|&c| {
            phantom_reflectance(&PhantomSpec::new(c, 0.0).unwrap())
                .unwrap()
                .band_value(460.0)
                .unwrap()
        })
        .collect();
    assert!(r.windows(2).all(|w| w[1] < w[0]), "{r:?}");
}

#[test]
fn absorbance_is_linear_in_concentration() {
    let bg = 0.9;
    for &c in &PHANTOM_SERIES_MG_DL {
        let r = phantom_reflectance(&PhantomSpec::new(c, 0.0).unwrap())
            .unwrap()
            .band_value(460.0)
            .unwrap();
        let absorbance = -(r / bg).ln();
        assert!((absorbance - BILIRUBIN_SCALE * c).abs() < 1e-12);
    }
}

#[test]
fn flat_white_renders_near_200() {
    let flat = Spectrum::constant(default_grid(), 1.0).unwrap();
    let rgb = render_rgb(&CameraModel::noiseless(), &flat);
    assert!((190.0..=210.0).contains(&rgb.max_channel()), "{rgb:?}");
}

#[test]
fn gain_scales_linear_response() {
    let s = phantom_reflectance(&PhantomSpec::new(5.0, 0.3).unwrap()).unwrap();
    let a = render_linear(&CameraModel::noiseless(), &s);
    let b = render_linear(&CameraModel::noiseless().with_gain(2.0), &s);
    for c in 0..3 {
        assert!((b[c] - 2.0 * a[c]).abs() < 1e-12);
    }
}

#[test]
fn dataset_is_reproducible() {
    let o = DatasetOptions::default();
    let a = generate_dataset(320, &o, 7).unwrap();
    let b = generate_dataset(320, &o, 7).unwrap();
    assert_eq!(dataset_to_csv(&a.records), dataset_to_csv(&b.records));
    let c = generate_dataset(320, &o, 8).unwrap();
    assert_ne!(a.records, c.records);
    // records do not depend on how many are drawn
    let short = generate_dataset(10, &o, 7).unwrap();
    assert_eq!(short.records[..], a.records[..10]);
}

#[test]
fn zero_bilirubin_dataset_is_the_background_family() {
    let o = DatasetOptions {
        bbl_range: (0.0, 0.0),
        hemoglobin_range: (0.0, 0.0),
        background_scale_range: (1.0, 1.0),
        background_tilt_range: (0.0, 0.0),
        ..DatasetOptions::default()
    };
    let base = phantom_reflectance(&PhantomSpec::new(0.0, 0.0).unwrap()).unwrap();
    for r in generate_dataset(20, &o, 1).unwrap().records {
        assert_eq!(r.bbl, 0.0);
        for (a, b) in r.spectrum.values().iter().zip(base.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}

#[test]
fn bad_ranges() {
    let o = DatasetOptions {
        bbl_range: (10.0, 2.0),
        ..DatasetOptions::default()
    };
    assert!(matches!(generate_dataset(5, &o, 1).unwrap_err(), Error::BadRange(_)));
    assert!(generate_dataset(0, &DatasetOptions::default(), 1).is_err());
}

#[test]
fn noiseless_records_reconstruct_within_tolerance() {
    let o = DatasetOptions {
        camera: CameraModel::noiseless(),
        ..DatasetOptions::default()
    };
    let chart = phantom_chart(&o).unwrap();
    let (_, truth) = generate_chart_scene(&chart, &o.camera, 8).unwrap();
    let tm = wiener_tm(&truth, &chart).unwrap();
    let ds = generate_dataset(320, &o, 42).unwrap();
    let good = ds
        .records
        .iter()
        .filter(|r| spectral_rmse(&reconstruct_pixel(&tm, r.rgb), &r.spectrum).unwrap() < 0.04)
        .count();
    assert!(good as f64 >= 0.9 * 320.0, "{good} of 320");
}

#[test]
fn chart_scene_samples_back_to_truth() {
    let chart = classic_chart().unwrap();
    let (image, truth) = generate_chart_scene(&chart, &CameraModel::noiseless(), 16).unwrap();
    let sampled = sample_chart(&image, &chart, chart.layout(), 0.25).unwrap();
    assert_eq!(sampled, truth);
}

#[test]
fn scene_noise_follows_the_seed() {
    let chart = classic_chart().unwrap();
    let (a, ta) = generate_chart_scene(&chart, &CameraModel::default().with_seed(1), 8).unwrap();
    let (b, tb) = generate_chart_scene(&chart, &CameraModel::default().with_seed(2), 8).unwrap();
    assert_ne!(a, b);
    assert_eq!(ta, tb);
}

#[test]
fn cross_chart_rmse_under_limit() {
    let report = default_chart_test(1.5, 42).unwrap();
    assert!(report.mean < 0.04, "{}", report.mean);
    assert_eq!(report.per_block.len(), 96);
}
