use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use speccam::calibration::{wiener_tm, TransformationMatrix};
use speccam::phantom::{
    generate_chart_scene, phantom_chart, phantom_reflectance, phantom_series, render_rgb, CameraModel,
    DatasetOptions, PhantomSpec,
};
use speccam::reconstruction::{
    aggregate_session, extract_roi_spectrum, reconstruct_image, reconstruct_pixel, reconstruct_roi,
    two_band_index, MeasurementSession, Snapshot, SnapshotSource,
};
use speccam::spectral::{default_grid, RgbImage, RgbTriple, Roi, SpectralCube};
use speccam::Error;

fn random_tm(seed: u64) -> TransformationMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..27)
        .map(|_| [rng.random_range(-0.01..0.01), rng.random_range(-0.01..0.01), rng.random_range(-0.01..0.01)])
        .collect();
    TransformationMatrix::new(default_grid(), rows).unwrap()
}

fn random_image(w: usize, h: usize, rng: &mut ChaCha8Rng) -> RgbImage {
    let px = (0..w * h)
        .map(|_| {
            RgbTriple::new(
                rng.random_range(0.0..255.0),
                rng.random_range(0.0..255.0),
                rng.random_range(0.0..255.0),
            )
            .unwrap()
        })
        .collect();
    RgbImage::new(w, h, px).unwrap()
}

fn random_cube(w: usize, h: usize, rng: &mut ChaCha8Rng) -> SpectralCube {
    let data = (0..w * h * 27).map(|_| rng.random_range(0.0..1.2)).collect();
    SpectralCube::new(w, h, default_grid(), data).unwrap()
}

fn random_roi(w: usize, h: usize, rng: &mut ChaCha8Rng) -> Roi {
    let side = rng.random_range(1..=w.min(h) / 2);
    Roi::new(rng.random_range(0..=w - side), rng.random_range(0..=h - side), side).unwrap()
}

#[test]
fn image_path_equals_scalar_path_bitwise() {
    let tm = random_tm(1);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let image = random_image(32, 32, &mut rng);
    let cube = reconstruct_image(&tm, &image);
    for y in 0..32 {
        for x in 0..32 {
            let a = cube.pixel_spectrum(x, y);
            let b = reconstruct_pixel(&tm, image.get(x, y));
            for (u, v) in a.values().iter().zip(b.values()) {
                assert_eq!(u.to_bits(), v.to_bits());
            }
        }
    }
}

#[test]
fn single_pixel_and_constant_images() {
    let tm = random_tm(3);
    let c = RgbTriple::new(120.0, 80.0, 200.0).unwrap();
    let one = reconstruct_image(&tm, &RgbImage::filled(1, 1, c).unwrap());
    assert_eq!(one.pixel_spectrum(0, 0), reconstruct_pixel(&tm, c));

    let cube = reconstruct_image(&tm, &RgbImage::filled(64, 64, c).unwrap());
    let first = cube.pixel_spectrum(0, 0);
    for (x, y) in [(63, 0), (0, 63), (31, 17), (63, 63)] {
        assert_eq!(cube.pixel_spectrum(x, y), first);
    }
    // any ROI of a constant image gives the pixel spectrum
    let roi = extract_roi_spectrum(&cube, Roi::new(5, 9, 16).unwrap()).unwrap();
    for (a, b) in roi.values().iter().zip(first.values()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn roi_mean_matches_summation() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cube = random_cube(30, 20, &mut rng);
    for _ in 0..20 {
        let roi = random_roi(30, 20, &mut rng);
        let got = extract_roi_spectrum(&cube, roi).unwrap();
        for band in 0..27 {
            let mut sum = 0.0;
            for y in roi.y..roi.y + roi.side {
                for x in roi.x..roi.x + roi.side {
                    sum += cube.pixel_spectrum(x, y).values()[band];
                }
            }
            let want = sum / (roi.side * roi.side) as f64;
            assert!((got.values()[band] - want).abs() < 1e-12);
        }
    }
}

#[test]
fn roi_outside_cube() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cube = random_cube(10, 10, &mut rng);
    let err = extract_roi_spectrum(&cube, Roi::new(5, 5, 6).unwrap()).unwrap_err();
    assert!(matches!(err, Error::RoiOutOfBounds { .. }));
}

#[test]
fn lazy_roi_path_is_bit_identical() {
    let tm = random_tm(6);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let image = random_image(40, 30, &mut rng);
    let cube = reconstruct_image(&tm, &image);
    for _ in 0..10 {
        let roi = random_roi(40, 30, &mut rng);
        let lazy = reconstruct_roi(&tm, &image, roi).unwrap();
        let full = extract_roi_spectrum(&cube, roi).unwrap();
        for (a, b) in lazy.values().iter().zip(full.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

fn cube_session(rng: &mut ChaCha8Rng, snapshots: usize, rois: usize) -> Vec<(SpectralCube, Vec<Roi>)> {
    (0..snapshots)
        .map(|_| {
            let cube = random_cube(24, 24, rng);
            let r = (0..rois).map(|_| random_roi(24, 24, rng)).collect();
            (cube, r)
        })
        .collect()
}

fn session_of(parts: &[(SpectralCube, Vec<Roi>)]) -> MeasurementSession {
    MeasurementSession::new(
        parts
            .iter()
            .map(|(c, r)| Snapshot {
                source: SnapshotSource::Cube(c.clone()),
                rois: r.clone(),
            })
            .collect(),
    )
    .unwrap()
}

#[test]
fn aggregate_matches_nested_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let parts = cube_session(&mut rng, 10, 10);
    let got = aggregate_session(&session_of(&parts), &random_tm(0)).unwrap();
    for band in 0..27 {
        let mut over_snapshots = 0.0;
        for (cube, rois) in &parts {
            let mut over_rois = 0.0;
            for roi in rois {
                let mut sum = 0.0;
                for y in roi.y..roi.y + roi.side {
                    for x in roi.x..roi.x + roi.side {
                        sum += cube.data()[band * 24 * 24 + y * 24 + x];
                    }
                }
                over_rois += sum / (roi.side * roi.side) as f64;
            }
            over_snapshots += over_rois / rois.len() as f64;
        }
        let want = over_snapshots / parts.len() as f64;
        assert!((got.values()[band] - want).abs() < 1e-12);
    }
}

#[test]
fn single_roi_session_equals_extraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let parts = cube_session(&mut rng, 1, 1);
    let got = aggregate_session(&session_of(&parts), &random_tm(0)).unwrap();
    assert_eq!(got, extract_roi_spectrum(&parts[0].0, parts[0].1[0]).unwrap());
}

#[test]
fn snapshots_weigh_equally() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut parts = cube_session(&mut rng, 2, 1);
    parts[1].1 = (0..5).map(|_| random_roi(24, 24, &mut rng)).collect();
    let tm = random_tm(0);
    let m1 = aggregate_session(&session_of(&parts[..1]), &tm).unwrap();
    let m2 = aggregate_session(&session_of(&parts[1..]), &tm).unwrap();
    let got = aggregate_session(&session_of(&parts), &tm).unwrap();
    for b in 0..27 {
        let want = (m1.values()[b] + m2.values()[b]) / 2.0;
        assert!((got.values()[b] - want).abs() < 1e-12);
    }
}

#[test]
fn aggregate_ignores_ordering() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let tm = random_tm(12);
    // RGB snapshots exercise the reconstruct-per-ROI path
    let parts: Vec<(RgbImage, Vec<Roi>)> = (0..4)
        .map(|_| {
            let img = random_image(20, 20, &mut rng);
            let rois = (0..rng.random_range(1..6)).map(|_| random_roi(20, 20, &mut rng)).collect();
            (img, rois)
        })
        .collect();
    let build = |parts: &[(RgbImage, Vec<Roi>)]| {
        MeasurementSession::new(
            parts
                .iter()
                .map(|(i, r)| Snapshot {
                    source: SnapshotSource::Rgb(i.clone()),
                    rois: r.clone(),
                })
                .collect(),
        )
        .unwrap()
    };
    let base = aggregate_session(&build(&parts), &tm).unwrap();
    let mut shuffled = parts.clone();
    shuffled.shuffle(&mut rng);
    for (_, rois) in shuffled.iter_mut() {
        rois.shuffle(&mut rng);
    }
    let other = aggregate_session(&build(&shuffled), &tm).unwrap();
    for (a, b) in base.values().iter().zip(other.values()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn empty_sessions_are_rejected() {
    assert!(matches!(
        MeasurementSession::new(vec![]).unwrap_err(),
        Error::EmptyInput(_)
    ));
}

fn phantom_tm() -> TransformationMatrix {
    let chart = phantom_chart(&DatasetOptions::default()).unwrap();
    let (_, truth) = generate_chart_scene(&chart, &CameraModel::noiseless(), 8).unwrap();
    wiener_tm(&truth, &chart).unwrap()
}

#[test]
fn phantom_pixel_round_trip() {
    let tm = phantom_tm();
    let camera = CameraModel::noiseless();
    for (c, hb) in [(0.0, 0.2), (3.0, 0.4), (12.0, 0.1), (25.0, 0.5)] {
        let truth = phantom_reflectance(&PhantomSpec::new(c, hb).unwrap()).unwrap();
        let rec = reconstruct_pixel(&tm, render_rgb(&camera, &truth));
        let rmse = speccam::evaluation::spectral_rmse(&rec, &truth).unwrap();
        assert!(rmse < 0.04, "c={c}: {rmse}");
    }
}

#[test]
fn two_band_index_falls_with_concentration() {
    let idx: Vec<f64> = phantom_series()
        .unwrap()
        .iter()
        .map(|s| two_band_index(s).unwrap())
        .collect();
    assert!(idx.windows(2).all(|w| w[1] < w[0]), "{idx:?}");
}
