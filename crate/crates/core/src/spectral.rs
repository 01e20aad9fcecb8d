//! Value types shared by every stage: wavelength grids, reflectance spectra,
//! RGB responses, RGB images, band-sequential spectral cubes and square ROIs.
//!
//! Spectra are kept in `f64`. Reflectance above 1 is legal (hyper-reflection
//! happens on real tissue) and nothing here clamps it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// First band of the default grid, nm.
pub const DEFAULT_START_NM: f64 = 420.0;
/// Band spacing of the default grid, nm.
pub const DEFAULT_STEP_NM: f64 = 10.0;
/// Number of bands on the default grid (420..=680 nm).
pub const DEFAULT_BAND_COUNT: usize = 27;

/// Maximum distance outside the grid span still accepted by nearest-band lookup.
const NEAREST_TOLERANCE_NM: f64 = 5.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WavelengthGrid {
    bands: Vec<f64>,
}

impl WavelengthGrid {
    pub fn new(bands: Vec<f64>) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::EmptyInput("wavelength grid"));
        }
        if bands.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidValue("non-finite band center".into()));
        }
        if bands.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidValue(
                "band centers must be strictly increasing".into(),
            ));
        }
        Ok(Self { bands })
    }

    /// The 27-band 420..=680 nm grid with a 10 nm step.
    pub fn default_grid() -> Self {
        let bands = (0..DEFAULT_BAND_COUNT)
            .map(|i| DEFAULT_START_NM + DEFAULT_STEP_NM * i as f64)
            .collect();
        Self { bands }
    }

    pub fn bands(&self) -> &[f64] {
        &self.bands
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.bands[0]
    }

    pub fn max(&self) -> f64 {
        self.bands[self.bands.len() - 1]
    }

    /// Index of the band centered exactly at `nm`.
    pub fn index_of(&self, nm: f64) -> Result<usize> {
        self.bands
            .iter()
            .position(|&b| (b - nm).abs() < 1e-9)
            .ok_or(Error::BandNotFound(nm))
    }

    /// Index of the band nearest to `nm`. Half-way ties go to the lower band.
    pub fn nearest_index(&self, nm: f64) -> Result<usize> {
        if !nm.is_finite()
            || nm < self.min() - NEAREST_TOLERANCE_NM
            || nm > self.max() + NEAREST_TOLERANCE_NM
        {
            return Err(Error::BandNotFound(nm));
        }
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        for (i, &b) in self.bands.iter().enumerate() {
            let d = (b - nm).abs();
            // strict comparison keeps the lower wavelength on ties
            if d < best_dist {
                best = i;
                best_dist = d;
            }
        }
        Ok(best)
    }
}

impl Default for WavelengthGrid {
    fn default() -> Self {
        Self::default_grid()
    }
}

impl TryFrom<Vec<f64>> for WavelengthGrid {
    type Error = Error;

    fn try_from(bands: Vec<f64>) -> Result<Self> {
        Self::new(bands)
    }
}

impl From<WavelengthGrid> for Vec<f64> {
    fn from(grid: WavelengthGrid) -> Self {
        grid.bands
    }
}

pub fn default_grid() -> WavelengthGrid {
    WavelengthGrid::default_grid()
}

/// Reflectance sampled on a wavelength grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: WavelengthGrid,
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(grid: WavelengthGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidValue(format!(
                "spectrum has {} values for a {}-band grid",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidValue("non-finite reflectance".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: WavelengthGrid, value: f64) -> Result<Self> {
        let values = vec![value; grid.len()];
        Self::new(grid, values)
    }

    /// Evaluates `f` at each band center.
    pub fn from_fn(grid: WavelengthGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.bands().iter().map(|&nm| f(nm)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at the band centered exactly at `nm`.
    pub fn at(&self, nm: f64) -> Result<f64> {
        Ok(self.values[self.grid.index_of(nm)?])
    }

    /// Value at the nearest band (ties round down).
    pub fn band_value(&self, nm: f64) -> Result<f64> {
        Ok(self.values[self.grid.nearest_index(nm)?])
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            self.values.iter().map(|v| v * factor).collect(),
        )
    }
}

/// Nearest-band lookup, see [`Spectrum::band_value`].
pub fn band_value(s: &Spectrum, nm: f64) -> Result<f64> {
    s.band_value(nm)
}

/// Per-band arithmetic mean.
pub fn mean_spectra(spectra: &[Spectrum]) -> Result<Spectrum> {
    let first = spectra.first().ok_or(Error::EmptyInput("spectra"))?;
    if spectra.iter().any(|s| s.grid != first.grid) {
        return Err(Error::GridMismatch);
    }
    let mut acc = vec![0.0; first.len()];
    for s in spectra {
        for (a, v) in acc.iter_mut().zip(&s.values) {
            *a += v;
        }
    }
    let n = spectra.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    Spectrum::new(first.grid.clone(), acc)
}

/// Divides every band by the value at `nm`, which must be an exact grid band.
pub fn normalize_at(s: &Spectrum, nm: f64) -> Result<Spectrum> {
    let idx = s.grid.index_of(nm)?;
    let norm = s.values[idx];
    if norm <= 0.0 {
        return Err(Error::DegenerateNormalizer {
            band: nm,
            value: norm,
        });
    }
    let mut values: Vec<f64> = s.values.iter().map(|v| v / norm).collect();
    values[idx] = 1.0;
    Spectrum::new(s.grid.clone(), values)
}

/// Channel responses of one pixel or one averaged patch, on the 0..255 scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RgbTriple {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl RgbTriple {
    pub fn new(r: f64, g: f64, b: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !(ok(r) && ok(g) && ok(b)) {
            return Err(Error::InvalidValue(format!(
                "RGB components must be finite and non-negative: ({r}, {g}, {b})"
            )));
        }
        Ok(Self { r, g, b })
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }

    pub fn max_channel(self) -> f64 {
        self.r.max(self.g).max(self.b)
    }

    pub fn scaled(self, factor: f64) -> Result<Self> {
        Self::new(self.r * factor, self.g * factor, self.b * factor)
    }
}

/// Row-major RGB image.
#[derive(Clone, Debug, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<RgbTriple>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<RgbTriple>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidValue("image dimensions must be >= 1".into()));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidValue(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, color: RgbTriple) -> Result<Self> {
        Self::new(width, height, vec![color; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> RgbTriple,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[RgbTriple] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> RgbTriple {
        self.pixels[y * self.width + x]
    }

    /// Applies `f` to every pixel.
    pub fn map(&self, f: impl Fn(RgbTriple) -> RgbTriple) -> Self {
        Self {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| f(p)).collect(),
        }
    }
}

/// Band-sequential cube: `data[band * width * height + y * width + x]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCube {
    width: usize,
    height: usize,
    grid: WavelengthGrid,
    data: Vec<f64>,
}

impl SpectralCube {
    pub fn new(width: usize, height: usize, grid: WavelengthGrid, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidValue("cube dimensions must be >= 1".into()));
        }
        if data.len() != width * height * grid.len() {
            return Err(Error::InvalidValue(format!(
                "cube payload has {} values, expected {}",
                data.len(),
                width * height * grid.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidValue("non-finite cube value".into()));
        }
        Ok(Self {
            width,
            height,
            grid,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn plane(&self, band: usize) -> &[f64] {
        let n = self.width * self.height;
        &self.data[band * n..(band + 1) * n]
    }

    pub fn pixel_spectrum(&self, x: usize, y: usize) -> Spectrum {
        let n = self.width * self.height;
        let offset = y * self.width + x;
        let values = (0..self.grid.len())
            .map(|b| self.data[b * n + offset])
            .collect();
        Spectrum {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}

/// Square region of interest, top-left anchored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roi {
    pub x: usize,
    pub y: usize,
    pub side: usize,
}

impl Roi {
    pub const DEFAULT_SIDE: usize = 100;

    pub fn new(x: usize, y: usize, side: usize) -> Result<Self> {
        if side == 0 {
            return Err(Error::InvalidValue("ROI side must be >= 1".into()));
        }
        Ok(Self { x, y, side })
    }

    pub fn fits(&self, width: usize, height: usize) -> bool {
        self.x + self.side <= width && self.y + self.side <= height
    }

    pub(crate) fn check(&self, width: usize, height: usize) -> Result<()> {
        if self.fits(width, height) {
            Ok(())
        } else {
            Err(Error::RoiOutOfBounds {
                x: self.x,
                y: self.y,
                side: self.side,
                width,
                height,
            })
        }
    }

    pub fn pixel_count(&self) -> usize {
        self.side * self.side
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(values: Vec<f64>) -> Spectrum {
        Spectrum::new(default_grid(), values).unwrap()
    }

    #[test]
    fn default_grid_spans_420_to_680() {
        let g = default_grid();
        assert_eq!(g.len(), 27);
        assert_eq!(g.bands()[0], 420.0);
        assert_eq!(g.bands()[26], 680.0);
        assert_eq!(g.bands()[1] - g.bands()[0], 10.0);
        assert_eq!(g, default_grid());
    }

    #[test]
    fn grid_rejects_non_increasing() {
        assert!(WavelengthGrid::new(vec![420.0, 420.0]).is_err());
        assert!(WavelengthGrid::new(vec![430.0, 420.0]).is_err());
        assert!(WavelengthGrid::new(vec![]).is_err());
    }

    #[test]
    fn mean_of_identical_and_of_two_levels() {
        let s = Spectrum::from_fn(default_grid(), |nm| nm / 1000.0).unwrap();
        assert_eq!(mean_spectra(&[s.clone(), s.clone()]).unwrap(), s);

        let a = Spectrum::constant(default_grid(), 0.2).unwrap();
        let b = Spectrum::constant(default_grid(), 0.4).unwrap();
        let m = mean_spectra(&[a, b]).unwrap();
        assert!(m.values().iter().all(|v| (v - 0.3).abs() < 1e-15));
    }

    #[test]
    fn mean_errors() {
        assert!(matches!(mean_spectra(&[]), Err(Error::EmptyInput(_))));
        let a = Spectrum::constant(default_grid(), 0.2).unwrap();
        let other = Spectrum::constant(WavelengthGrid::new(vec![500.0]).unwrap(), 0.2).unwrap();
        assert!(matches!(mean_spectra(&[a, other]), Err(Error::GridMismatch)));
    }

    #[test]
    fn normalize_examples() {
        let s = Spectrum::constant(default_grid(), 0.5).unwrap();
        let n = normalize_at(&s, 680.0).unwrap();
        assert!(n.values().iter().all(|&v| v == 1.0));

        let mut values = vec![0.6; 27];
        values[4] = 0.4; // 460 nm
        values[26] = 0.8; // 680 nm
        let n = normalize_at(&spectrum(values), 680.0).unwrap();
        assert_eq!(n.at(460.0).unwrap(), 0.5);
        assert_eq!(n.at(680.0).unwrap(), 1.0);
        assert_eq!(normalize_at(&n, 680.0).unwrap(), n);
    }

    #[test]
    fn normalize_errors() {
        let s = Spectrum::constant(default_grid(), 0.0).unwrap();
        assert!(matches!(
            normalize_at(&s, 680.0),
            Err(Error::DegenerateNormalizer { .. })
        ));
        let s = Spectrum::constant(default_grid(), 0.5).unwrap();
        assert!(matches!(normalize_at(&s, 685.0), Err(Error::BandNotFound(_))));
    }

    #[test]
    fn nearest_band_lookup() {
        let s = Spectrum::from_fn(default_grid(), |nm| nm).unwrap();
        assert_eq!(band_value(&s, 460.0).unwrap(), 460.0);
        assert_eq!(band_value(&s, 464.0).unwrap(), 460.0);
        assert_eq!(band_value(&s, 465.0).unwrap(), 460.0);
        assert_eq!(band_value(&s, 466.0).unwrap(), 470.0);
        assert_eq!(band_value(&s, 415.0).unwrap(), 420.0);
        assert_eq!(band_value(&s, 685.0).unwrap(), 680.0);
        assert!(band_value(&s, 414.9).is_err());
        assert!(band_value(&s, 685.1).is_err());
    }

    #[test]
    fn spectrum_rejects_nan_and_bad_length() {
        assert!(Spectrum::new(default_grid(), vec![0.5; 26]).is_err());
        let mut v = vec![0.5; 27];
        v[3] = f64::NAN;
        assert!(Spectrum::new(default_grid(), v).is_err());
    }

    #[test]
    fn rgb_and_image_invariants() {
        assert!(RgbTriple::new(-1.0, 0.0, 0.0).is_err());
        assert!(RgbTriple::new(f64::INFINITY, 0.0, 0.0).is_err());
        let px = RgbTriple::new(1.0, 2.0, 3.0).unwrap();
        assert_eq!(px.max_channel(), 3.0);
        assert!(RgbImage::new(2, 2, vec![px; 3]).is_err());
        assert!(RgbImage::new(0, 2, vec![]).is_err());
        let img = RgbImage::from_fn(3, 2, |x, y| RgbTriple::new(x as f64, y as f64, 0.0).unwrap())
            .unwrap();
        assert_eq!(img.get(2, 1), RgbTriple::new(2.0, 1.0, 0.0).unwrap());
    }

    #[test]
    fn cube_layout_is_band_sequential() {
        let grid = WavelengthGrid::new(vec![500.0, 600.0]).unwrap();
        // 2x1 cube: band0 = [1, 2], band1 = [3, 4]
        let cube = SpectralCube::new(2, 1, grid, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(cube.pixel_spectrum(1, 0).values(), &[2.0, 4.0]);
        assert_eq!(cube.plane(1), &[3.0, 4.0]);
        assert_eq!(cube.min_max(), (1.0, 4.0));
    }

    #[test]
    fn roi_bounds() {
        let roi = Roi::new(5, 5, 10).unwrap();
        assert!(roi.fits(15, 15));
        assert!(!roi.fits(14, 15));
        assert!(Roi::new(0, 0, 0).is_err());
    }
}
