//! The `speccam` command line.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand};

use crate::calibration::{
    load_profile, sample_chart, save_profile, validate_exposure, wiener_tm, ChartLayout, DeviceProfile, Exposure,
};
use crate::error::{Error, Result};
use crate::evaluation::{
    self, curve_csv, default_chart_test, fraction_grid, learning_curve, stability_summary, svg, CurveOptions,
    DEFAULT_ROC_THRESHOLD,
};
use crate::formats;
use crate::phantom::{generate_dataset, DatasetOptions, DatasetRecord};
use crate::reconstruction::{check_roi_quality, extract_roi_spectrum, reconstruct_image, RoiQualityPolicy, RoiVerdict};
use crate::regression::{
    train, FeatureMode, HybridWeighting, ModelKind, ModelSpec, SpectrumFeatures, TrainingSet,
};
use crate::spectral::{mean_spectra, Spectrum};

pub const PROFILE_DIR_ENV: &str = "SPECCAM_PROFILE_DIR";

#[derive(Debug, Parser)]
#[command(name = "speccam", version, about = "Spectral reconstruction from phone RGB and bilirubin regression")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a device profile from a photographed colour chart.
    Calibrate(CalibrateArgs),
    /// Turn an RGB image into a multispectral cube.
    Reconstruct(ReconstructArgs),
    /// Average ROI spectra from one or more cubes.
    Extract(ExtractArgs),
    /// Write a synthetic phantom dataset.
    Simulate(SimulateArgs),
    /// Train one model on a whole dataset and save it.
    Train(TrainArgs),
    /// Cross-validate a model and report agreement statistics.
    Evaluate(EvaluateArgs),
    /// SAL and RGBL cross-validation over growing data fractions.
    LearningCurve(CurveArgs),
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Reference chart CSV (block_id,420,...,680).
    #[arg(long)]
    pub chart: PathBuf,
    /// Chart photograph (binary PPM).
    #[arg(long)]
    pub image: PathBuf,
    /// Cell grid as COLSxROWS; defaults from the chart size.
    #[arg(long)]
    pub layout: Option<ChartLayout>,
    #[arg(long)]
    pub device: String,
    #[arg(long, default_value = "unknown")]
    pub illuminant: String,
    /// Profile path; without it the profile goes to the profile store.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fraction of each cell edge ignored on every side when sampling.
    #[arg(long, default_value_t = 0.25)]
    pub margin: f64,
    /// Fail instead of warning on badly exposed blocks.
    #[arg(long)]
    pub strict: bool,
    /// Fixed creation timestamp (RFC 3339) for reproducible output.
    #[arg(long)]
    pub created_at: Option<DateTime<Utc>>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Profile file, or a device name looked up in the profile store.
    #[arg(long)]
    pub profile: String,
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Cube file; repeat for several snapshots.
    #[arg(long, required = true)]
    pub cube: Vec<PathBuf>,
    /// ROI list (x,y,side[,snapshot_id]).
    #[arg(long)]
    pub rois: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Source RGB image per cube, enabling the ROI quality gate.
    #[arg(long)]
    pub image: Vec<PathBuf>,
    #[arg(long, default_value_t = 240.0)]
    pub max_mean_rgb: f64,
    #[arg(long, default_value_t = 30.0)]
    pub min_mean_rgb: f64,
    #[arg(long, default_value_t = 0.01)]
    pub max_saturated_fraction: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 320)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Camera noise standard deviation on the 0..255 scale.
    #[arg(long, default_value_t = 1.5)]
    pub noise: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also run the 24-to-96 block chart reconstruction test.
    #[arg(long)]
    pub chart_test: bool,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value = "hybrid")]
    pub model: ModelKind,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Stacked non-negative weights for the hybrid instead of equal ones.
    #[arg(long)]
    pub stacked: bool,
    /// Divide spectra by their 680 nm value before learning.
    #[arg(long)]
    pub normalize_680: bool,
}

impl ModelArgs {
    fn spec(&self) -> ModelSpec {
        let mut spec = ModelSpec::new(self.model).with_seed(self.seed);
        if self.stacked {
            spec.hybrid.weighting = HybridWeighting::Stacked;
        }
        spec
    }

    fn spectra(&self) -> SpectrumFeatures {
        if self.normalize_680 {
            SpectrumFeatures::Normalized680
        } else {
            SpectrumFeatures::Raw
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "sal")]
    pub mode: FeatureMode,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "sal")]
    pub mode: FeatureMode,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// ROC positive class is BBL above this, µmol/L.
    #[arg(long, default_value_t = DEFAULT_ROC_THRESHOLD)]
    pub threshold: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Directory for scatter, Bland-Altman and ROC SVGs.
    #[arg(long)]
    pub plots: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0.125)]
    pub from: f64,
    #[arg(long, default_value_t = 1.0)]
    pub to: f64,
    #[arg(long, default_value_t = 0.0625)]
    pub step: f64,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Resamples averaged per fraction.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Stability summary JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    pub plots: Option<PathBuf>,
}

/// Profile store: `$SPECCAM_PROFILE_DIR`, else `~/.speccam/profiles`, else `./profiles`.
pub fn profile_store_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(PROFILE_DIR_ENV).filter(|d| !d.is_empty()) {
        return PathBuf::from(dir);
    }
    match std::env::var_os("HOME") {
        Some(home) => Path::new(&home).join(".speccam").join("profiles"),
        None => PathBuf::from("profiles"),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Calibrate(a) => cmd_calibrate(&a),
        Command::Reconstruct(a) => cmd_reconstruct(&a),
        Command::Extract(a) => cmd_extract(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::LearningCurve(a) => cmd_learning_curve(&a),
    }
}

pub fn cmd_calibrate(a: &CalibrateArgs) -> Result<()> {
    let chart = formats::read_chart(&a.chart)?;
    let image = formats::read_ppm(&a.image)?;
    let layout = a.layout.unwrap_or(chart.layout());
    if layout.cells() != chart.blocks().len() {
        return Err(Error::ChartMismatch(format!(
            "layout {}x{} has {} cells but the chart has {} blocks",
            layout.cols,
            layout.rows,
            layout.cells(),
            chart.blocks().len()
        )));
    }
    let samples = sample_chart(&image, &chart, layout, a.margin)?;
    let flagged: Vec<(String, Exposure)> = validate_exposure(&samples)
        .into_iter()
        .filter(|(_, e)| *e != Exposure::Ok)
        .collect();
    for (id, e) in &flagged {
        eprintln!("warning: block {id} is {}", if *e == Exposure::Overexposed { "overexposed" } else { "underexposed" });
    }
    if a.strict && !flagged.is_empty() {
        return Err(Error::InvalidValue(format!(
            "{} badly exposed block(s) in strict mode",
            flagged.len()
        )));
    }
    let tm = wiener_tm(&samples, &chart)?;
    let profile = DeviceProfile {
        device_model: a.device.clone(),
        illuminant: a.illuminant.clone(),
        chart_name: chart.name().to_string(),
        tm,
        created_at: a.created_at.unwrap_or_else(Utc::now),
    };
    let path = match &a.out {
        Some(p) => {
            profile.write_to(p)?;
            p.clone()
        }
        None => save_profile(&profile, &profile_store_dir())?,
    };
    println!(
        "profile {} ({} bands x 3) written to {}",
        profile.device_model,
        profile.tm.band_count(),
        path.display()
    );
    Ok(())
}

/// A path when it names an existing file, otherwise a device in the store.
pub fn resolve_profile(profile: &str) -> Result<DeviceProfile> {
    let p = Path::new(profile);
    if p.is_file() {
        return DeviceProfile::read_from(p);
    }
    if p.extension().is_some_and(|e| e == "json") {
        return Err(Error::io(p, std::io::Error::from(std::io::ErrorKind::NotFound)));
    }
    load_profile(profile, &profile_store_dir())
}

pub fn cmd_reconstruct(a: &ReconstructArgs) -> Result<()> {
    let profile = resolve_profile(&a.profile)?;
    let image = formats::read_ppm(&a.image)?;
    let cube = reconstruct_image(&profile.tm, &image);
    formats::write_cube(&a.out, &cube)?;
    let (lo, hi) = cube.min_max();
    println!(
        "{}x{} image -> {} bands; reflectance min {lo:.4} max {hi:.4}; written to {}",
        cube.width(),
        cube.height(),
        cube.grid().len(),
        a.out.display()
    );
    Ok(())
}

fn verdict_label(v: RoiVerdict) -> &'static str {
    use crate::reconstruction::RejectReason::*;
    match v {
        RoiVerdict::Accept => "ok",
        RoiVerdict::Reject(HyperReflective) => "rejected:hyper-reflective",
        RoiVerdict::Reject(UnderIlluminated) => "rejected:under-illuminated",
        RoiVerdict::Reject(Saturated) => "rejected:saturated",
    }
}

/// Cube index an ROI entry refers to: its snapshot id as an index or file
/// stem, or every cube when it has none.
fn target_cubes(snapshot: Option<&str>, cubes: &[PathBuf], row: usize) -> Result<Vec<usize>> {
    let Some(id) = snapshot else {
        return Ok((0..cubes.len()).collect());
    };
    if let Ok(i) = id.parse::<usize>() {
        if i < cubes.len() {
            return Ok(vec![i]);
        }
    }
    cubes
        .iter()
        .position(|c| c.file_stem().is_some_and(|s| s == id))
        .map(|i| vec![i])
        .ok_or_else(|| Error::InvalidValue(format!("ROI row {row}: unknown snapshot '{id}'")))
}

pub fn cmd_extract(a: &ExtractArgs) -> Result<()> {
    let policy = RoiQualityPolicy::new(a.max_mean_rgb, a.min_mean_rgb, a.max_saturated_fraction)?;
    if !a.image.is_empty() && a.image.len() != a.cube.len() {
        return Err(Error::InvalidValue(format!(
            "{} images given for {} cubes",
            a.image.len(),
            a.cube.len()
        )));
    }
    let cubes = a.cube.iter().map(|p| formats::read_cube(p)).collect::<Result<Vec<_>>>()?;
    let images = a.image.iter().map(|p| formats::read_ppm(p)).collect::<Result<Vec<_>>>()?;
    if cubes.windows(2).any(|w| w[0].grid() != w[1].grid()) {
        return Err(Error::GridMismatch);
    }
    let grid = cubes[0].grid().clone();
    let entries = formats::read_rois(&a.rois)?;

    let mut out = String::from("roi,snapshot,x,y,side,status");
    for b in grid.bands() {
        let _ = write!(out, ",{b}");
    }
    out.push('\n');
    let push_row = |out: &mut String, label: &str, snap: &str, pos: &str, status: &str, s: &Spectrum| {
        let _ = write!(out, "{label},{snap},{pos},{status}");
        for v in s.values() {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    };

    let mut accepted: Vec<Vec<Spectrum>> = vec![Vec::new(); cubes.len()];
    for e in &entries {
        for ci in target_cubes(e.snapshot_id.as_deref(), &a.cube, e.row)? {
            let cube = &cubes[ci];
            let located = |err: Error| Error::InvalidValue(format!("ROI row {}: {err}", e.row));
            let spectrum = extract_roi_spectrum(cube, e.roi).map_err(located)?;
            let verdict = match images.get(ci) {
                Some(img) => check_roi_quality(img, e.roi, &policy).map_err(located)?,
                None => RoiVerdict::Accept,
            };
            if verdict == RoiVerdict::Accept {
                accepted[ci].push(spectrum.clone());
            }
            let pos = format!("{},{},{}", e.roi.x, e.roi.y, e.roi.side);
            push_row(&mut out, &e.row.to_string(), &ci.to_string(), &pos, verdict_label(verdict), &spectrum);
        }
    }
    // mean over ROIs within each snapshot, then over snapshots
    let snapshot_means = accepted
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| mean_spectra(s))
        .collect::<Result<Vec<_>>>()?;
    if snapshot_means.is_empty() {
        return Err(Error::InvalidValue("every ROI was rejected by the quality policy".into()));
    }
    let aggregate = mean_spectra(&snapshot_means)?;
    push_row(&mut out, "aggregate", "", ",,", "ok", &aggregate);
    formats::write_text(&a.out, &out)?;
    let used: usize = accepted.iter().map(Vec::len).sum();
    println!(
        "{used} ROI spectra from {} snapshot(s) averaged; written to {}",
        snapshot_means.len(),
        a.out.display()
    );
    Ok(())
}

pub const MIN_DATASET_SIZE: usize = 20;

pub fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    if a.n < MIN_DATASET_SIZE {
        return Err(Error::SubsetTooSmall {
            n: a.n,
            min: MIN_DATASET_SIZE,
        });
    }
    let mut options = DatasetOptions::default();
    options.camera.noise_sigma = a.noise;
    let dataset = generate_dataset(a.n, &options, a.seed)?;
    formats::write_dataset(&a.out, &dataset)?;
    println!("{} records written to {}", dataset.records.len(), a.out.display());
    if a.chart_test {
        let report = default_chart_test(a.noise, a.seed)?;
        println!(
            "chart test ({} -> {}): mean RMSE {:.4}, max {:.4}: {}",
            report.calibration_chart,
            report.test_chart,
            report.mean,
            report.max,
            if report.passed() { "PASS" } else { "FAIL" }
        );
    }
    Ok(())
}

fn load_training_set(a: &ModelArgs, mode: FeatureMode) -> Result<(Vec<DatasetRecord>, TrainingSet)> {
    let records = formats::read_dataset(&a.dataset)?;
    let ts = TrainingSet::from_records(&records, mode, a.spectra())?;
    Ok((records, ts))
}

pub fn cmd_train(a: &TrainArgs) -> Result<()> {
    let (_, ts) = load_training_set(&a.model, a.mode)?;
    let model = train(&ts, &a.model.spec())?;
    model.save(&a.out)?;
    println!("{} model on {} {} rows written to {}", a.model.model, ts.len(), a.mode, a.out.display());
    Ok(())
}

pub fn cmd_evaluate(a: &EvaluateArgs) -> Result<()> {
    let (_, ts) = load_training_set(&a.model, a.mode)?;
    let report = evaluation::evaluate(&ts, &a.model.spec(), a.folds, a.threshold)?;
    let mut json = report.to_json();
    json.push('\n');
    formats::write_text(&a.out, &json)?;
    if let Some(dir) = &a.plots {
        ensure_dir(dir)?;
        for (name, body) in [
            ("scatter.svg", svg::scatter_plot(&report)),
            ("bland_altman.svg", svg::bland_altman_plot(&report)),
            ("roc.svg", svg::roc_plot(&report)),
        ] {
            formats::write_text(&dir.join(name), &body)?;
        }
    }
    let ag = &report.agreement;
    println!(
        "{} {} n={}: r={:.4} (p={:.3e}) MD={:.3} LOA=[{:.3}, {:.3}] AUROC={:.4}",
        report.model, report.mode, ag.n, ag.r, ag.p_value, ag.md, ag.loa_lower, ag.loa_upper, report.roc.auroc
    );
    Ok(())
}

pub fn cmd_learning_curve(a: &CurveArgs) -> Result<()> {
    let fractions = fraction_grid(a.from, a.to, a.step)?;
    let (_, sal) = load_training_set(&a.model, FeatureMode::Sal)?;
    let (_, rgbl) = load_training_set(&a.model, FeatureMode::Rgbl)?;
    let spec = a.model.spec();
    let options = CurveOptions {
        fractions,
        folds: a.folds,
        seed: a.model.seed,
        repeats: a.repeats,
    };
    let curve = learning_curve(&sal, &rgbl, &spec, &spec, &options)?;
    formats::write_text(&a.out, &curve_csv(&curve))?;
    if curve.points.len() >= 2 {
        let s = stability_summary(&curve)?;
        println!("stability (std across fractions):");
        for (mode, m) in [("sal", s.sal), ("rgbl", s.rgbl)] {
            println!("  {mode}: r {:.5}  md {:.4}  std_md {:.4}", m.r, m.md, m.std_md);
        }
        if let Some(path) = &a.summary {
            let mut json = serde_json::to_string_pretty(&s).expect("summary serializes");
            json.push('\n');
            formats::write_text(path, &json)?;
        }
    }
    if let Some(dir) = &a.plots {
        ensure_dir(dir)?;
        for (key, body) in svg::curve_plots(&curve) {
            formats::write_text(&dir.join(format!("curve_{key}.svg")), &body)?;
        }
    }
    println!("{} fractions x 2 modes written to {}", curve.points.len(), a.out.display());
    Ok(())
}
