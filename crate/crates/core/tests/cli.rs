use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use speccam::calibration::DeviceProfile;
use speccam::formats::{read_cube, read_dataset, write_chart, write_ppm};
use speccam::phantom::{classic_chart, generate_chart_scene, CameraModel};
use speccam::spectral::{RgbImage, RgbTriple};

fn speccam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_speccam"))
        .args(args)
        .env("SPECCAM_PROFILE_DIR", "/nonexistent-profile-store")
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Chart CSV, chart photo and a calibrated profile in `dir`.
fn calibrated(dir: &Path) -> PathBuf {
    let chart = classic_chart().unwrap();
    let (image, _) = generate_chart_scene(&chart, &CameraModel::default().with_seed(3), 24).unwrap();
    write_chart(&dir.join("chart.csv"), &chart).unwrap();
    write_ppm(&dir.join("chart.ppm"), &image).unwrap();
    let profile = dir.join("phone.profile.json");
    let o = speccam(&[
        "calibrate",
        "--chart", p(&dir.join("chart.csv")),
        "--image", p(&dir.join("chart.ppm")),
        "--device", "phone",
        "--illuminant", "d65",
        "--created-at", "2024-01-02T03:04:05Z",
        "--out", p(&profile),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    profile
}

fn scene_image(dir: &Path) -> PathBuf {
    let img = RgbImage::from_fn(50, 40, |x, y| {
        RgbTriple::new(60.0 + 2.0 * x as f64, 90.0 + y as f64, 120.0).unwrap()
    })
    .unwrap();
    let path = dir.join("scene.ppm");
    write_ppm(&path, &img).unwrap();
    path
}

#[test]
fn calibrate_writes_a_profile() {
    let dir = tempfile::tempdir().unwrap();
    let path = calibrated(dir.path());
    let profile = DeviceProfile::read_from(&path).unwrap();
    assert_eq!(profile.device_model, "phone");
    assert_eq!(profile.illuminant, "d65");
    assert_eq!(profile.tm.band_count(), 27);
    // fixed timestamp makes the file reproducible
    let first = std::fs::read(&path).unwrap();
    calibrated(dir.path());
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn calibrate_without_chart_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    calibrated(dir.path());
    let o = speccam(&[
        "calibrate",
        "--chart", p(&dir.path().join("missing.csv")),
        "--image", p(&dir.path().join("chart.ppm")),
        "--device", "phone",
        "--out", p(&dir.path().join("x.json")),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("missing.csv"));
}

#[test]
fn calibrate_rejects_wrong_layout() {
    let dir = tempfile::tempdir().unwrap();
    calibrated(dir.path());
    let o = speccam(&[
        "calibrate",
        "--chart", p(&dir.path().join("chart.csv")),
        "--image", p(&dir.path().join("chart.ppm")),
        "--layout", "12x8",
        "--device", "phone",
        "--out", p(&dir.path().join("x.json")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reconstruct_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let profile = calibrated(dir.path());
    let image = scene_image(dir.path());
    let a = dir.path().join("a.cube");
    let b = dir.path().join("b.cube");
    for out in [&a, &b] {
        let o = speccam(&["reconstruct", "--profile", p(&profile), "--image", p(&image), "--out", p(out)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let cube = read_cube(&a).unwrap();
    assert_eq!((cube.width(), cube.height(), cube.grid().len()), (50, 40, 27));
}

#[test]
fn reconstruct_with_unknown_device() {
    let dir = tempfile::tempdir().unwrap();
    let image = scene_image(dir.path());
    let o = speccam(&["reconstruct", "--profile", "nokia", "--image", p(&image), "--out", p(&dir.path().join("c"))]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("nokia"));
}

#[test]
fn extract_writes_one_row_per_roi_plus_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let profile = calibrated(dir.path());
    let image = scene_image(dir.path());
    let cube = dir.path().join("s.cube");
    assert_eq!(speccam(&["reconstruct", "--profile", p(&profile), "--image", p(&image), "--out", p(&cube)]).status.code(), Some(0));

    let rois: String = (0..10).map(|i| format!("{},{},8\n", i * 4, i * 3)).collect();
    std::fs::write(dir.path().join("rois.csv"), format!("x,y,side\n{rois}")).unwrap();
    let out = dir.path().join("spectra.csv");
    let o = speccam(&[
        "extract",
        "--cube", p(&cube),
        "--rois", p(&dir.path().join("rois.csv")),
        "--out", p(&out),
        "--image", p(&image),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 11);
    assert!(lines[0].starts_with("roi,snapshot,x,y,side,status,420,"));
    assert!(lines[11].starts_with("aggregate,"));
    assert_eq!(lines[1].split(',').count(), 6 + 27);
}

#[test]
fn extract_names_the_bad_roi_row() {
    let dir = tempfile::tempdir().unwrap();
    let profile = calibrated(dir.path());
    let image = scene_image(dir.path());
    let cube = dir.path().join("s.cube");
    speccam(&["reconstruct", "--profile", p(&profile), "--image", p(&image), "--out", p(&cube)]);
    std::fs::write(dir.path().join("rois.csv"), "1,1,4\n2,2,4\n45,10,10\n").unwrap();
    let o = speccam(&[
        "extract",
        "--cube", p(&cube),
        "--rois", p(&dir.path().join("rois.csv")),
        "--out", p(&dir.path().join("o.csv")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("row 3"), "{}", stderr(&o));
}

#[test]
fn simulate_is_deterministic_and_checks_size() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        assert_eq!(speccam(&["simulate", "--n", "40", "--seed", "9", "--out", p(out)]).status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(read_dataset(&a).unwrap().len(), 40);
    let o = speccam(&["simulate", "--n", "10", "--out", p(&dir.path().join("c.csv"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_runs_the_chart_test() {
    let dir = tempfile::tempdir().unwrap();
    let o = speccam(&["simulate", "--n", "20", "--out", p(&dir.path().join("d.csv")), "--chart-test"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS"), "{}", stdout(&o));
}

fn small_dataset(dir: &Path) -> PathBuf {
    let path = dir.join("data.csv");
    assert_eq!(speccam(&["simulate", "--n", "60", "--seed", "4", "--out", p(&path)]).status.code(), Some(0));
    path
}

#[test]
fn train_and_evaluate_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_dataset(dir.path());
    for model in ["knn", "rf", "svr"] {
        let outs: Vec<Vec<u8>> = (0..2)
            .map(|i| {
                let out = dir.path().join(format!("{model}{i}.json"));
                let o = speccam(&["train", "--dataset", p(&data), "--model", model, "--out", p(&out)]);
                assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
                std::fs::read(out).unwrap()
            })
            .collect();
        assert_eq!(outs[0], outs[1]);
    }
    let plots = dir.path().join("plots");
    let reports: Vec<String> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("eval{i}.json"));
            let o = speccam(&[
                "evaluate", "--dataset", p(&data), "--model", "knn", "--mode", "rgbl",
                "--out", p(&out), "--plots", p(&plots),
            ]);
            assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
            assert!(stdout(&o).contains("AUROC"));
            std::fs::read_to_string(out).unwrap()
        })
        .collect();
    assert_eq!(reports[0], reports[1]);
    for svg in ["scatter.svg", "bland_altman.svg", "roc.svg"] {
        assert!(std::fs::read_to_string(plots.join(svg)).unwrap().starts_with("<svg"));
    }
}

#[test]
fn unknown_model_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_dataset(dir.path());
    let o = speccam(&["train", "--dataset", p(&data), "--model", "xgboost", "--out", p(&dir.path().join("m"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn learning_curve_row_counts() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    assert_eq!(speccam(&["simulate", "--out", p(&data)]).status.code(), Some(0));

    let single = dir.path().join("single.csv");
    let o = speccam(&[
        "learning-curve", "--dataset", p(&data), "--model", "knn", "--from", "1.0", "--to", "1.0",
        "--out", p(&single),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&single).unwrap().lines().count(), 1 + 2);

    let full = dir.path().join("full.csv");
    let summary = dir.path().join("summary.json");
    let o = speccam(&[
        "learning-curve", "--dataset", p(&data), "--model", "knn", "--out", p(&full),
        "--summary", p(&summary),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&full).unwrap();
    assert_eq!(text.lines().count(), 1 + 30);
    assert!(text.lines().skip(1).all(|l| l.split(',').count() == 6));
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(summary).unwrap()).unwrap();
    assert!(s["sal"]["r"].as_f64().unwrap() >= 0.0);
}

#[test]
fn help_exits_cleanly() {
    let o = speccam(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for cmd in ["calibrate", "reconstruct", "extract", "simulate", "evaluate", "learning-curve"] {
        assert!(stdout(&o).contains(cmd), "{cmd}");
    }
}
