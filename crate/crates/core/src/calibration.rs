//! Color-chart calibration.
//!
//! The transformation matrix maps an RGB response to a reflectance spectrum
//! and is estimated from chart blocks of known reflectance as
//!
//! ```text
//! W = <S v^T> (<v v^T> + eps I)^-1
//! ```
//!
//! where `<>` averages over blocks, `S` is a block's reference spectrum and
//! `v` its measured RGB. The averages are raw second moments (no mean
//! removal). `eps` is a ridge relative to the trace of `<v v^T>`, so it scales
//! with the data and scaling every RGB by `g` divides `W` by exactly `g`.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{RgbImage, RgbTriple, Spectrum, WavelengthGrid};

/// Exposure bounds on the block's maximum channel.
pub const SATURATION_LEVEL: f64 = 255.0;
pub const UNDEREXPOSURE_LEVEL: f64 = 100.0;

/// Default ridge factor: `eps = factor * trace(<v v^T>) / 3`.
pub const DEFAULT_RIDGE_FACTOR: f64 = 1e-8;
/// Largest 1-norm condition number of the regularized moment matrix.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct ChartBlock {
    pub id: String,
    pub reflectance: Spectrum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColorChart {
    name: String,
    blocks: Vec<ChartBlock>,
}

impl ColorChart {
    pub fn new(name: impl Into<String>, blocks: Vec<ChartBlock>) -> Result<Self> {
        if blocks.len() != 24 && blocks.len() != 96 {
            return Err(Error::ChartMismatch(format!(
                "a chart has 24 or 96 blocks, got {}",
                blocks.len()
            )));
        }
        let mut seen = HashSet::new();
        for b in &blocks {
            if !seen.insert(b.id.as_str()) {
                return Err(Error::ChartMismatch(format!("duplicate block id '{}'", b.id)));
            }
        }
        let grid = blocks[0].reflectance.grid();
        if blocks.iter().any(|b| b.reflectance.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            name: name.into(),
            blocks,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn blocks(&self) -> &[ChartBlock] {
        &self.blocks
    }

    pub fn grid(&self) -> &WavelengthGrid {
        self.blocks[0].reflectance.grid()
    }

    pub fn layout(&self) -> ChartLayout {
        ChartLayout::for_block_count(self.blocks.len()).expect("chart has 24 or 96 blocks")
    }
}

/// Sampling box array, `cols` across and `rows` down (6x4 or 12x8).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChartLayout {
    pub cols: usize,
    pub rows: usize,
}

impl ChartLayout {
    pub const CLASSIC_24: ChartLayout = ChartLayout { cols: 6, rows: 4 };
    pub const DIGITAL_96: ChartLayout = ChartLayout { cols: 12, rows: 8 };

    pub fn for_block_count(n: usize) -> Option<Self> {
        match n {
            24 => Some(Self::CLASSIC_24),
            96 => Some(Self::DIGITAL_96),
            _ => None,
        }
    }

    pub fn cells(&self) -> usize {
        self.cols * self.rows
    }
}

impl std::str::FromStr for ChartLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidValue(format!("layout '{s}' is not of the form COLSxROWS"));
        let (c, r) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let cols: usize = c.trim().parse().map_err(|_| bad())?;
        let rows: usize = r.trim().parse().map_err(|_| bad())?;
        if cols == 0 || rows == 0 {
            return Err(bad());
        }
        Ok(Self { cols, rows })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartSamples {
    pub chart_name: String,
    pub samples: Vec<(String, RgbTriple)>,
}

impl ChartSamples {
    /// Labels `rgb` with the chart's block ids, in order.
    pub fn for_chart(chart: &ColorChart, rgb: Vec<RgbTriple>) -> Result<Self> {
        if rgb.len() != chart.blocks.len() {
            return Err(Error::ChartMismatch(format!(
                "{} samples for a {}-block chart",
                rgb.len(),
                chart.blocks.len()
            )));
        }
        Ok(Self {
            chart_name: chart.name.clone(),
            samples: chart.blocks.iter().map(|b| b.id.clone()).zip(rgb).collect(),
        })
    }

    pub fn rgb(&self) -> impl Iterator<Item = RgbTriple> + '_ {
        self.samples.iter().map(|(_, v)| *v)
    }

    pub fn scaled(&self, gain: f64) -> Result<Self> {
        let samples = self
            .samples
            .iter()
            .map(|(id, v)| Ok((id.clone(), v.scaled(gain)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            chart_name: self.chart_name.clone(),
            samples,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exposure {
    Ok,
    Overexposed,
    Underexposed,
}

/// Per-block exposure verdict from the maximum channel.
///
/// Eight-bit data can never exceed 255, so reaching 255 counts as saturated.
pub fn validate_exposure(samples: &ChartSamples) -> Vec<(String, Exposure)> {
    samples
        .samples
        .iter()
        .map(|(id, rgb)| {
            let m = rgb.max_channel();
            let verdict = if m >= SATURATION_LEVEL {
                Exposure::Overexposed
            } else if m < UNDEREXPOSURE_LEVEL {
                Exposure::Underexposed
            } else {
                Exposure::Ok
            };
            (id.clone(), verdict)
        })
        .collect()
}

/// RGB to reflectance map; one row per band, columns R, G, B.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformationMatrix {
    grid: WavelengthGrid,
    rows: Vec<[f64; 3]>,
}

impl TransformationMatrix {
    pub fn new(grid: WavelengthGrid, rows: Vec<[f64; 3]>) -> Result<Self> {
        if rows.len() != grid.len() {
            return Err(Error::InvalidValue(format!(
                "matrix has {} rows for a {}-band grid",
                rows.len(),
                grid.len()
            )));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidValue("non-finite matrix entry".into()));
        }
        Ok(Self { grid, rows })
    }

    pub fn zeros(grid: WavelengthGrid) -> Self {
        let rows = vec![[0.0; 3]; grid.len()];
        Self { grid, rows }
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn rows(&self) -> &[[f64; 3]] {
        &self.rows
    }

    pub fn band_count(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WienerOptions {
    /// Relative ridge; 0 disables regularization.
    pub ridge_factor: f64,
}

impl Default for WienerOptions {
    fn default() -> Self {
        Self {
            ridge_factor: DEFAULT_RIDGE_FACTOR,
        }
    }
}

impl WienerOptions {
    pub fn unregularized() -> Self {
        Self { ridge_factor: 0.0 }
    }
}

type Mat3 = [[f64; 3]; 3];

fn one_norm(m: &Mat3) -> f64 {
    (0..3)
        .map(|c| (0..3).map(|r| m[r][c].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse by adjugate; `None` on a zero pivot. Near-singular input is
/// caught afterwards by the condition check.
fn invert3(m: &Mat3) -> Option<Mat3> {
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
        m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
    };
    let c00 = cof(1, 2, 1, 2);
    let c01 = -cof(1, 2, 0, 2);
    let c02 = cof(1, 2, 0, 1);
    let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    if !det.is_finite() || det == 0.0 {
        return None;
    }
    let adj = [
        [c00, -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [c01, cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [c02, -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let mut inv = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            inv[r][c] = adj[r][c] / det;
        }
    }
    Some(inv)
}

/// Wiener estimate from paired RGB responses and reference spectra.
pub fn wiener_estimate(
    rgb: &[RgbTriple],
    spectra: &[Spectrum],
    options: WienerOptions,
) -> Result<TransformationMatrix> {
    if rgb.len() != spectra.len() {
        return Err(Error::ChartMismatch(format!(
            "{} RGB samples for {} spectra",
            rgb.len(),
            spectra.len()
        )));
    }
    if rgb.len() < 3 {
        return Err(Error::ChartMismatch(format!(
            "at least 3 blocks are needed, got {}",
            rgb.len()
        )));
    }
    let grid = spectra[0].grid().clone();
    if spectra.iter().any(|s| *s.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    let n = rgb.len() as f64;
    let mut auto = [[0.0; 3]; 3];
    let mut cross = vec![[0.0; 3]; grid.len()];
    for (v, s) in rgb.iter().zip(spectra) {
        let v = v.to_array();
        for r in 0..3 {
            for c in 0..3 {
                auto[r][c] += v[r] * v[c];
            }
        }
        for (row, &sv) in cross.iter_mut().zip(s.values()) {
            for c in 0..3 {
                row[c] += sv * v[c];
            }
        }
    }
    for row in auto.iter_mut() {
        row.iter_mut().for_each(|x| *x /= n);
    }
    for row in cross.iter_mut() {
        row.iter_mut().for_each(|x| *x /= n);
    }
    let eps = options.ridge_factor * (auto[0][0] + auto[1][1] + auto[2][2]) / 3.0;
    for (i, row) in auto.iter_mut().enumerate() {
        row[i] += eps;
    }
    let inv = invert3(&auto).ok_or(Error::SingularCalibration {
        condition: f64::INFINITY,
    })?;
    let condition = one_norm(&auto) * one_norm(&inv);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularCalibration { condition });
    }
    let rows = cross
        .iter()
        .map(|row| {
            let mut out = [0.0; 3];
            for (c, o) in out.iter_mut().enumerate() {
                *o = row[0] * inv[0][c] + row[1] * inv[1][c] + row[2] * inv[2][c];
            }
            out
        })
        .collect();
    TransformationMatrix::new(grid, rows)
}

/// Transformation matrix from chart samples; samples must follow the chart's block order.
pub fn wiener_tm(samples: &ChartSamples, chart: &ColorChart) -> Result<TransformationMatrix> {
    wiener_tm_with(samples, chart, WienerOptions::default())
}

pub fn wiener_tm_with(
    samples: &ChartSamples,
    chart: &ColorChart,
    options: WienerOptions,
) -> Result<TransformationMatrix> {
    if samples.samples.len() != chart.blocks.len() {
        return Err(Error::ChartMismatch(format!(
            "{} samples for a {}-block chart",
            samples.samples.len(),
            chart.blocks.len()
        )));
    }
    for ((id, _), block) in samples.samples.iter().zip(&chart.blocks) {
        if *id != block.id {
            return Err(Error::ChartMismatch(format!(
                "sample '{id}' does not match block '{}'",
                block.id
            )));
        }
    }
    let rgb: Vec<RgbTriple> = samples.rgb().collect();
    let spectra: Vec<Spectrum> = chart.blocks.iter().map(|b| b.reflectance.clone()).collect();
    wiener_estimate(&rgb, &spectra, options)
}

/// Pixel span `[start, end)` of cell `i` of `count` across `extent` pixels,
/// shrunk by `margin` of the cell size on both sides.
fn inner_span(i: usize, count: usize, extent: usize, margin: f64) -> (usize, usize) {
    let start = i * extent / count;
    let end = (i + 1) * extent / count;
    let shrink = (margin * (end - start) as f64).round() as usize;
    let a = start + shrink;
    let b = end.saturating_sub(shrink);
    (a, b.max(a))
}

/// Smallest accepted sampling box edge, px.
const MIN_BOX_PX: usize = 4;

/// Averages the central `1 - 2 * margin` part of every layout cell, row-major
/// from the top-left, and labels the results with `chart`'s block ids.
pub fn sample_chart(
    image: &RgbImage,
    chart: &ColorChart,
    layout: ChartLayout,
    margin_fraction: f64,
) -> Result<ChartSamples> {
    let rgb = sample_cells(image, layout, margin_fraction)?;
    ChartSamples::for_chart(chart, rgb)
}

/// Mean RGB of each layout cell's central region, row-major.
pub fn sample_cells(
    image: &RgbImage,
    layout: ChartLayout,
    margin_fraction: f64,
) -> Result<Vec<RgbTriple>> {
    if !(0.0..0.5).contains(&margin_fraction) {
        return Err(Error::InvalidValue(format!(
            "margin fraction {margin_fraction} outside [0, 0.5)"
        )));
    }
    let too_fine = Error::LayoutTooFine {
        cols: layout.cols,
        rows: layout.rows,
        width: image.width(),
        height: image.height(),
    };
    let mut out = Vec::with_capacity(layout.cells());
    for row in 0..layout.rows {
        let (y0, y1) = inner_span(row, layout.rows, image.height(), margin_fraction);
        if y1 - y0 < MIN_BOX_PX {
            return Err(too_fine);
        }
        for col in 0..layout.cols {
            let (x0, x1) = inner_span(col, layout.cols, image.width(), margin_fraction);
            if x1 - x0 < MIN_BOX_PX {
                return Err(too_fine);
            }
            // shifted by the first pixel so a flat cell comes back exactly
            let p0 = image.get(x0, y0);
            let mut acc = [0.0; 3];
            for y in y0..y1 {
                for x in x0..x1 {
                    let p = image.get(x, y);
                    acc[0] += p.r - p0.r;
                    acc[1] += p.g - p0.g;
                    acc[2] += p.b - p0.b;
                }
            }
            let count = ((x1 - x0) * (y1 - y0)) as f64;
            out.push(RgbTriple::new(
                (p0.r + acc[0] / count).max(0.0),
                (p0.g + acc[1] / count).max(0.0),
                (p0.b + acc[2] / count).max(0.0),
            )?);
        }
    }
    Ok(out)
}

/// A stored transformation matrix for one phone model and illuminant.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviceProfile {
    pub device_model: String,
    pub illuminant: String,
    pub chart_name: String,
    pub tm: TransformationMatrix,
    pub created_at: DateTime<Utc>,
}

#[derive(Serialize, Deserialize)]
struct ProfileFile {
    device_model: String,
    illuminant: String,
    chart_name: String,
    wavelengths: Vec<f64>,
    matrix: Vec<[f64; 3]>,
    created_at: String,
}

impl DeviceProfile {
    pub fn to_json(&self) -> String {
        let file = ProfileFile {
            device_model: self.device_model.clone(),
            illuminant: self.illuminant.clone(),
            chart_name: self.chart_name.clone(),
            wavelengths: self.tm.grid.bands().to_vec(),
            matrix: self.tm.rows.clone(),
            created_at: self.created_at.to_rfc3339_opts(SecondsFormat::AutoSi, true),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("profile serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let corrupt = |reason: String| Error::ProfileCorrupt {
            path: path.to_path_buf(),
            reason,
        };
        let file: ProfileFile = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
        let grid = WavelengthGrid::new(file.wavelengths).map_err(|e| corrupt(e.to_string()))?;
        let tm = TransformationMatrix::new(grid, file.matrix).map_err(|e| corrupt(e.to_string()))?;
        let created_at = DateTime::parse_from_rfc3339(&file.created_at)
            .map_err(|e| corrupt(format!("created_at: {e}")))?
            .with_timezone(&Utc);
        Ok(Self {
            device_model: file.device_model,
            illuminant: file.illuminant,
            chart_name: file.chart_name,
            tm,
            created_at,
        })
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json().as_bytes())
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidValue(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// `<store_dir>/<device_model>.profile.json`
pub fn profile_path(device_model: &str, store_dir: &Path) -> Result<PathBuf> {
    if device_model.is_empty()
        || device_model.contains(['/', '\\'])
        || device_model == "."
        || device_model == ".."
    {
        return Err(Error::InvalidValue(format!(
            "'{device_model}' is not a valid device model name"
        )));
    }
    Ok(store_dir.join(format!("{device_model}.profile.json")))
}

pub fn save_profile(profile: &DeviceProfile, store_dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(store_dir).map_err(|e| Error::io(store_dir, e))?;
    let path = profile_path(&profile.device_model, store_dir)?;
    profile.write_to(&path)?;
    Ok(path)
}

pub fn load_profile(device_model: &str, store_dir: &Path) -> Result<DeviceProfile> {
    let path = profile_path(device_model, store_dir)?;
    if !path.exists() {
        return Err(Error::ProfileNotFound(device_model.to_string()));
    }
    DeviceProfile::read_from(&path)
}
