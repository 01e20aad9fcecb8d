//! Synthetic ground truth: chromophore absorption, phantom reflectance,
//! a three-channel camera forward model, reference charts and seeded
//! dataset generation.
//!
//! Absorption shapes are Gaussians standing in for tabulated extinction
//! spectra. Bilirubin peaks at 460 nm and is negligible above 650 nm;
//! hemoglobin has its two visible peaks at 540 and 576 nm. Reflectance
//! follows Beer-Lambert attenuation of a scattering background:
//!
//! ```text
//! R(l) = B(l) * exp(-(k_b e_b(l) c_b + k_h e_h(l) c_h) * L)
//! ```

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::calibration::{ChartBlock, ChartSamples, ColorChart};
use crate::error::{Error, Result};
use crate::seed;
use crate::spectral::{default_grid, RgbImage, RgbTriple, Spectrum, DEFAULT_STEP_NM};

/// µmol/L per mg/dL of bilirubin.
pub const UMOL_PER_MG_DL: f64 = 17.1;

/// Phantom concentrations, mg/dL.
pub const PHANTOM_SERIES_MG_DL: [f64; 9] = [0.00, 0.23, 0.47, 0.94, 1.88, 3.75, 7.50, 15.00, 30.00];

/// Bilirubin absorption scale: 30 mg/dL leaves half of the background at 460 nm.
pub const BILIRUBIN_SCALE: f64 = std::f64::consts::LN_2 / 30.0;
/// Hemoglobin absorption scale per arbitrary concentration unit.
pub const HEMOGLOBIN_SCALE: f64 = 1.0;

/// Flat background reflectance of the default phantom.
pub const DEFAULT_BACKGROUND: f64 = 0.9;

const EXTINCTION_MIN_NM: f64 = 400.0;
const EXTINCTION_MAX_NM: f64 = 700.0;

fn gaussian(nm: f64, center: f64, sigma: f64) -> f64 {
    let z = (nm - center) / sigma;
    (-0.5 * z * z).exp()
}

fn check_range(nm: f64) -> Result<()> {
    if (EXTINCTION_MIN_NM..=EXTINCTION_MAX_NM).contains(&nm) {
        Ok(())
    } else {
        Err(Error::BandNotFound(nm))
    }
}

pub fn bilirubin_extinction(nm: f64) -> Result<f64> {
    check_range(nm)?;
    Ok(gaussian(nm, 460.0, 35.0))
}

pub fn hemoglobin_extinction(nm: f64) -> Result<f64> {
    check_range(nm)?;
    Ok(gaussian(nm, 540.0, 15.0) + 0.8 * gaussian(nm, 576.0, 15.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chromophore {
    Bilirubin,
    Hemoglobin,
}

impl Chromophore {
    pub fn name(self) -> &'static str {
        match self {
            Chromophore::Bilirubin => "bilirubin",
            Chromophore::Hemoglobin => "hemoglobin",
        }
    }

    pub fn extinction(self, nm: f64) -> Result<f64> {
        match self {
            Chromophore::Bilirubin => bilirubin_extinction(nm),
            Chromophore::Hemoglobin => hemoglobin_extinction(nm),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhantomSpec {
    /// Bilirubin, mg/dL.
    pub bilirubin_mg_dl: f64,
    /// Hemoglobin, arbitrary units.
    pub hemoglobin: f64,
    pub pathlength: f64,
    pub background: Spectrum,
}

impl PhantomSpec {
    pub fn new(bilirubin_mg_dl: f64, hemoglobin: f64) -> Result<Self> {
        let spec = Self {
            bilirubin_mg_dl,
            hemoglobin,
            pathlength: 1.0,
            background: Spectrum::constant(default_grid(), DEFAULT_BACKGROUND)?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_bbl(bbl_umol_l: f64, hemoglobin: f64) -> Result<Self> {
        Self::new(bbl_umol_l / UMOL_PER_MG_DL, hemoglobin)
    }

    pub fn with_background(mut self, background: Spectrum) -> Result<Self> {
        self.background = background;
        self.validate()?;
        Ok(self)
    }

    pub fn bbl_umol_l(&self) -> f64 {
        self.bilirubin_mg_dl * UMOL_PER_MG_DL
    }

    fn validate(&self) -> Result<()> {
        if !(self.bilirubin_mg_dl >= 0.0 && self.hemoglobin >= 0.0) {
            return Err(Error::InvalidValue("concentrations must be >= 0".into()));
        }
        if !(self.pathlength >= 0.0 && self.pathlength.is_finite()) {
            return Err(Error::InvalidValue("pathlength must be >= 0".into()));
        }
        if self.background.values().iter().any(|&v| !(v > 0.0 && v <= 1.5)) {
            return Err(Error::InvalidValue("background must lie in (0, 1.5]".into()));
        }
        Ok(())
    }
}

pub fn phantom_reflectance(spec: &PhantomSpec) -> Result<Spectrum> {
    let grid = spec.background.grid().clone();
    let values = grid
        .bands()
        .iter()
        .zip(spec.background.values())
        .map(|(&nm, &bg)| {
            let absorbance = BILIRUBIN_SCALE * bilirubin_extinction(nm)? * spec.bilirubin_mg_dl
                + HEMOGLOBIN_SCALE * hemoglobin_extinction(nm)? * spec.hemoglobin;
            Ok(bg * (-absorbance * spec.pathlength).exp())
        })
        .collect::<Result<Vec<_>>>()?;
    Spectrum::new(grid, values)
}

/// One Gaussian channel sensitivity with unit peak.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianBand {
    pub center: f64,
    pub sigma: f64,
}

impl GaussianBand {
    pub fn at(&self, nm: f64) -> f64 {
        gaussian(nm, self.center, self.sigma)
    }
}

/// Default R, G, B sensitivities; they overlap on purpose.
pub const DEFAULT_SENSITIVITIES: [GaussianBand; 3] = [
    GaussianBand { center: 600.0, sigma: 45.0 },
    GaussianBand { center: 540.0, sigma: 45.0 },
    GaussianBand { center: 465.0, sigma: 40.0 },
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Illuminant {
    Flat,
    /// Planck radiator, normalized to 1 at 560 nm.
    Blackbody { kelvin: f64 },
}

impl Illuminant {
    pub fn power(&self, nm: f64) -> f64 {
        match *self {
            Illuminant::Flat => 1.0,
            Illuminant::Blackbody { kelvin } => planck(nm, kelvin) / planck(560.0, kelvin),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Illuminant::Flat => "flat".into(),
            Illuminant::Blackbody { kelvin } => format!("blackbody-{kelvin:.0}K"),
        }
    }
}

fn planck(nm: f64, kelvin: f64) -> f64 {
    // second radiation constant, nm K
    const C2: f64 = 1.438_776_877e7;
    let l = nm;
    1.0 / (l.powi(5) * ((C2 / (l * kelvin)).exp() - 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub sensitivities: [GaussianBand; 3],
    pub illuminant: Illuminant,
    pub gain: f64,
    /// Additive Gaussian noise on the 0..255 scale.
    pub noise_sigma: f64,
    pub seed: u64,
}

pub const DEFAULT_NOISE_SIGMA: f64 = 1.5;

impl Default for CameraModel {
    fn default() -> Self {
        Self {
            sensitivities: DEFAULT_SENSITIVITIES,
            illuminant: Illuminant::Flat,
            gain: 1.0,
            noise_sigma: DEFAULT_NOISE_SIGMA,
            seed: 0,
        }
    }
}

impl CameraModel {
    pub fn noiseless() -> Self {
        Self {
            noise_sigma: 0.0,
            ..Self::default()
        }
    }

    pub fn with_gain(mut self, gain: f64) -> Self {
        self.gain = gain;
        self
    }

    pub fn with_noise(mut self, sigma: f64) -> Self {
        self.noise_sigma = sigma;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.gain > 0.0 && self.gain.is_finite()) {
            return Err(Error::InvalidValue("camera gain must be > 0".into()));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidValue("noise sigma must be >= 0".into()));
        }
        Ok(())
    }
}

/// Scale so that a unit-reflectance spectrum under the default camera
/// gives 200 on its strongest channel.
pub fn render_scale() -> f64 {
    let grid = default_grid();
    let peak = DEFAULT_SENSITIVITIES
        .iter()
        .map(|s| grid.bands().iter().map(|&nm| s.at(nm) * DEFAULT_STEP_NM).sum::<f64>())
        .fold(0.0, f64::max);
    200.0 / peak
}

/// Channel responses before noise and clamping. Linear in `s`.
pub fn render_linear(camera: &CameraModel, s: &Spectrum) -> [f64; 3] {
    let scale = render_scale() * camera.gain;
    let mut out = [0.0; 3];
    for (c, band) in camera.sensitivities.iter().enumerate() {
        let mut acc = 0.0;
        for (&nm, &v) in s.grid().bands().iter().zip(s.values()) {
            acc += band.at(nm) * camera.illuminant.power(nm) * v * DEFAULT_STEP_NM;
        }
        out[c] = scale * acc;
    }
    out
}

fn finish(linear: [f64; 3], sigma: f64, rng: &mut ChaCha8Rng) -> RgbTriple {
    let mut v = linear;
    if sigma > 0.0 {
        let noise = Normal::new(0.0, sigma).expect("sigma is finite and positive");
        for c in v.iter_mut() {
            *c += noise.sample(rng);
        }
    }
    RgbTriple::new(v[0].clamp(0.0, 255.0), v[1].clamp(0.0, 255.0), v[2].clamp(0.0, 255.0))
        .expect("clamped values are valid")
}

/// Noisy, clamped rendering drawing noise from `rng`.
pub fn render_rgb_with(camera: &CameraModel, s: &Spectrum, rng: &mut ChaCha8Rng) -> RgbTriple {
    finish(render_linear(camera, s), camera.noise_sigma, rng)
}

/// Renders with noise drawn from the camera's own seed.
pub fn render_rgb(camera: &CameraModel, s: &Spectrum) -> RgbTriple {
    let mut rng = seed::rng_for(camera.seed, "render");
    render_rgb_with(camera, s, &mut rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BblDistribution {
    Uniform,
    LogUniform,
}

/// Everything that shapes a synthetic cohort besides its size and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetOptions {
    /// Blood bilirubin range, µmol/L.
    pub bbl_range: (f64, f64),
    pub distribution: BblDistribution,
    pub camera: CameraModel,
    /// Hemoglobin drawn uniformly from this range (arbitrary units).
    pub hemoglobin_range: (f64, f64),
    /// Multiplier on the flat background level.
    pub background_scale_range: (f64, f64),
    /// Relative background slope across the grid, drawn uniformly.
    pub background_tilt_range: (f64, f64),
}

impl Default for DatasetOptions {
    fn default() -> Self {
        Self {
            bbl_range: (2.0, 450.0),
            distribution: BblDistribution::LogUniform,
            camera: CameraModel::default(),
            hemoglobin_range: (0.1, 0.6),
            background_scale_range: (0.95, 1.05),
            background_tilt_range: (-0.05, 0.05),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetRecord {
    pub id: usize,
    pub rgb: RgbTriple,
    pub spectrum: Spectrum,
    /// µmol/L
    pub bbl: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticDataset {
    pub records: Vec<DatasetRecord>,
    pub seed: u64,
    pub provenance: DatasetOptions,
}

fn check_pair(name: &str, (lo, hi): (f64, f64), min: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo >= min && lo <= hi) {
        return Err(Error::BadRange(format!("{name} [{lo}, {hi}]")));
    }
    Ok(())
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

/// Background of one synthetic subject: flat level times a linear tilt
/// pivoting at 550 nm.
pub fn tilted_background(level: f64, tilt: f64) -> Result<Spectrum> {
    Spectrum::from_fn(default_grid(), |nm| level * (1.0 + tilt * (nm - 550.0) / 130.0))
}

pub fn generate_dataset(n: usize, options: &DatasetOptions, seed: u64) -> Result<SyntheticDataset> {
    if n == 0 {
        return Err(Error::BadRange("dataset size must be >= 1".into()));
    }
    check_pair("bbl range", options.bbl_range, 0.0)?;
    if options.distribution == BblDistribution::LogUniform
        && options.bbl_range.0 <= 0.0
        && options.bbl_range.0 != options.bbl_range.1
    {
        return Err(Error::BadRange(
            "log-uniform bbl range needs a positive lower bound".into(),
        ));
    }
    check_pair("hemoglobin range", options.hemoglobin_range, 0.0)?;
    check_pair("background scale", options.background_scale_range, 0.0)?;
    check_pair("background tilt", options.background_tilt_range, -1.0)?;
    if options.background_tilt_range.1 >= 1.0 {
        return Err(Error::BadRange("background tilt must stay below 1".into()));
    }
    options.camera.validate()?;

    let records = (0..n)
        .map(|id| {
            // per-record stream: records do not depend on each other's draws
            let mut rng = seed::rng_indexed(seed, "record", id as u64);
            let (lo, hi) = options.bbl_range;
            let bbl = match options.distribution {
                _ if lo == hi => lo,
                BblDistribution::Uniform => rng.random_range(lo..hi),
                BblDistribution::LogUniform => rng.random_range(lo.ln()..hi.ln()).exp(),
            };
            let hemoglobin = draw(&mut rng, options.hemoglobin_range);
            let level = DEFAULT_BACKGROUND * draw(&mut rng, options.background_scale_range);
            let tilt = draw(&mut rng, options.background_tilt_range);
            let spec = PhantomSpec::from_bbl(bbl, hemoglobin)?
                .with_background(tilted_background(level, tilt)?)?;
            let spectrum = phantom_reflectance(&spec)?;
            let rgb = render_rgb_with(&options.camera, &spectrum, &mut rng);
            Ok(DatasetRecord {
                id,
                rgb,
                spectrum,
                bbl,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SyntheticDataset {
        records,
        seed,
        provenance: options.clone(),
    })
}

/// Noiseless reflectances of the nine-step bilirubin phantom series on the
/// default flat background.
pub fn phantom_series() -> Result<Vec<Spectrum>> {
    PHANTOM_SERIES_MG_DL
        .iter()
        .map(|&c| phantom_reflectance(&PhantomSpec::new(c, 0.0)?))
        .collect()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// A smooth pigment-like reflectance curve.
fn random_pigment(rng: &mut ChaCha8Rng) -> Result<Spectrum> {
    let kind = rng.random_range(0..3);
    let lo = rng.random_range(0.04..0.35);
    let hi = rng.random_range(0.45..0.9);
    let f: Box<dyn Fn(f64) -> f64> = match kind {
        0 => {
            // rising or falling edge
            let edge = rng.random_range(460.0..640.0);
            let width = rng.random_range(25.0..45.0);
            let rising = rng.random_bool(0.6);
            Box::new(move |nm| {
                let t = sigmoid((nm - edge) / width);
                let t = if rising { t } else { 1.0 - t };
                lo + (hi - lo) * t
            })
        }
        1 => {
            // broad reflectance band
            let center = rng.random_range(450.0..640.0);
            let width = rng.random_range(45.0..80.0);
            Box::new(move |nm| lo + (hi - lo) * gaussian(nm, center, width))
        }
        _ => {
            // broad absorption band
            let center = rng.random_range(450.0..640.0);
            let width = rng.random_range(45.0..80.0);
            Box::new(move |nm| hi - (hi - lo) * gaussian(nm, center, width))
        }
    };
    Spectrum::from_fn(default_grid(), f)
}

/// Tissue-like block: a phantom with random chromophore load.
fn random_skin_tone(rng: &mut ChaCha8Rng) -> Result<Spectrum> {
    let spec = PhantomSpec::new(rng.random_range(0.0..20.0), rng.random_range(0.1..0.8))?
        .with_background(tilted_background(
            DEFAULT_BACKGROUND * rng.random_range(0.5..1.0),
            rng.random_range(-0.15..0.15),
        )?)?;
    phantom_reflectance(&spec)
}

fn chart_from(name: &str, prefix: &str, spectra: Vec<Spectrum>) -> Result<ColorChart> {
    let blocks = spectra
        .into_iter()
        .enumerate()
        .map(|(i, reflectance)| ChartBlock {
            id: format!("{prefix}{}", i + 1),
            reflectance,
        })
        .collect();
    ColorChart::new(name, blocks)
}

const NEUTRAL_LEVELS: [f64; 6] = [0.9, 0.59, 0.36, 0.19, 0.09, 0.03];

/// Synthetic 24-block calibration chart: 18 colored blocks and a six-step gray ramp.
pub fn classic_chart() -> Result<ColorChart> {
    let mut rng = seed::rng_for(0, "classic-chart");
    let mut spectra = Vec::with_capacity(24);
    for i in 0..18 {
        spectra.push(if i % 6 == 5 {
            random_skin_tone(&mut rng)?
        } else {
            random_pigment(&mut rng)?
        });
    }
    for level in NEUTRAL_LEVELS {
        spectra.push(Spectrum::constant(default_grid(), level)?);
    }
    chart_from("synthetic-classic-24", "C", spectra)
}

/// Synthetic 96-block evaluation chart, distinct from the calibration chart:
/// pigments, skin tones and grays.
pub fn digital_chart() -> Result<ColorChart> {
    let mut rng = seed::rng_for(0, "digital-chart");
    let mut spectra = Vec::with_capacity(96);
    for i in 0..96 {
        spectra.push(match i % 8 {
            0 => Spectrum::constant(default_grid(), rng.random_range(0.03..0.9))?,
            1 | 2 => random_skin_tone(&mut rng)?,
            _ => random_pigment(&mut rng)?,
        });
    }
    chart_from("synthetic-digital-96", "D", spectra)
}

/// 24 phantom reflectances spanning the cohort's chromophore ranges, for
/// calibrating against the phantom family itself.
pub fn phantom_chart(options: &DatasetOptions) -> Result<ColorChart> {
    let mut rng = seed::rng_for(0, "phantom-chart");
    let (lo, hi) = options.bbl_range;
    let spectra = (0..24)
        .map(|i| {
            // spread bilirubin evenly in log space, jitter the rest
            let t = i as f64 / 23.0;
            let bbl = if lo > 0.0 {
                (lo.ln() + t * (hi.ln() - lo.ln())).exp()
            } else {
                lo + t * (hi - lo)
            };
            let spec = PhantomSpec::from_bbl(bbl, draw(&mut rng, options.hemoglobin_range))?
                .with_background(tilted_background(
                    DEFAULT_BACKGROUND * draw(&mut rng, options.background_scale_range),
                    draw(&mut rng, options.background_tilt_range),
                )?)?;
            phantom_reflectance(&spec)
        })
        .collect::<Result<Vec<_>>>()?;
    chart_from("phantom-24", "P", spectra)
}

/// Default sampling cell edge for rendered chart scenes, px.
pub const DEFAULT_CELL_PX: usize = 24;

/// Renders a chart as a grid of flat cells (6x4 or 12x8) with per-pixel noise.
/// Returns the image and the noiseless per-block RGB.
pub fn generate_chart_scene(
    chart: &ColorChart,
    camera: &CameraModel,
    cell_px: usize,
) -> Result<(RgbImage, ChartSamples)> {
    camera.validate()?;
    if cell_px == 0 {
        return Err(Error::InvalidValue("cell size must be >= 1".into()));
    }
    let layout = chart.layout();
    let truth: Vec<RgbTriple> = chart
        .blocks()
        .iter()
        .map(|b| {
            let v = render_linear(camera, &b.reflectance);
            RgbTriple::new(v[0].clamp(0.0, 255.0), v[1].clamp(0.0, 255.0), v[2].clamp(0.0, 255.0))
        })
        .collect::<Result<_>>()?;
    let mut rng = seed::rng_for(camera.seed, "chart-scene");
    let noise = (camera.noise_sigma > 0.0)
        .then(|| Normal::new(0.0, camera.noise_sigma).expect("valid sigma"));
    let image = RgbImage::from_fn(layout.cols * cell_px, layout.rows * cell_px, |x, y| {
        let block = (y / cell_px) * layout.cols + x / cell_px;
        let t = truth[block];
        match &noise {
            None => t,
            Some(n) => {
                let mut v = t.to_array();
                for c in v.iter_mut() {
                    *c = (*c + n.sample(&mut rng)).clamp(0.0, 255.0);
                }
                RgbTriple::new(v[0], v[1], v[2]).expect("clamped")
            }
        }
    })?;
    Ok((image, ChartSamples::for_chart(chart, truth)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extinction_shapes() {
        assert_eq!(bilirubin_extinction(460.0).unwrap(), 1.0);
        assert!(bilirubin_extinction(680.0).unwrap() < 0.01);
        assert!(hemoglobin_extinction(540.0).unwrap() >= hemoglobin_extinction(500.0).unwrap());
        assert!(bilirubin_extinction(399.0).is_err());
        assert!(hemoglobin_extinction(701.0).is_err());
        assert!(Chromophore::Hemoglobin.extinction(576.0).unwrap() > 0.8);
    }

    #[test]
    fn zero_absorption_returns_background() {
        let spec = PhantomSpec::new(0.0, 0.0).unwrap();
        assert_eq!(phantom_reflectance(&spec).unwrap(), spec.background);
    }

    #[test]
    fn thirty_mg_dl_halves_460() {
        let r = phantom_reflectance(&PhantomSpec::new(30.0, 0.0).unwrap()).unwrap();
        let ratio = r.at(460.0).unwrap() / DEFAULT_BACKGROUND;
        assert!((ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bad_specs() {
        assert!(PhantomSpec::new(-1.0, 0.0).is_err());
        let bg = Spectrum::constant(default_grid(), 1.6).unwrap();
        assert!(PhantomSpec::new(1.0, 0.0).unwrap().with_background(bg).is_err());
    }

    #[test]
    fn zero_spectrum_renders_black() {
        let zero = Spectrum::constant(default_grid(), 0.0).unwrap();
        let rgb = render_rgb(&CameraModel::noiseless(), &zero);
        assert_eq!(rgb.to_array(), [0.0; 3]);
    }

    #[test]
    fn noise_clamps_to_valid_range() {
        let camera = CameraModel::default().with_noise(50.0).with_seed(3);
        let white = Spectrum::constant(default_grid(), 1.5).unwrap();
        let rgb = render_rgb(&camera, &white);
        assert!(rgb.to_array().iter().all(|&v| (0.0..=255.0).contains(&v)));
    }

    #[test]
    fn dataset_range_errors() {
        let mut o = DatasetOptions::default();
        o.bbl_range = (10.0, 5.0);
        assert!(matches!(generate_dataset(5, &o, 1), Err(Error::BadRange(_))));
        o.bbl_range = (0.0, 5.0);
        assert!(matches!(generate_dataset(5, &o, 1), Err(Error::BadRange(_))));
        o.distribution = BblDistribution::Uniform;
        assert!(generate_dataset(5, &o, 1).is_ok());
        assert!(generate_dataset(0, &DatasetOptions::default(), 1).is_err());
    }

    #[test]
    fn charts_have_expected_sizes() {
        assert_eq!(classic_chart().unwrap().blocks().len(), 24);
        assert_eq!(digital_chart().unwrap().blocks().len(), 96);
        assert_eq!(phantom_chart(&DatasetOptions::default()).unwrap().blocks().len(), 24);
    }
}
