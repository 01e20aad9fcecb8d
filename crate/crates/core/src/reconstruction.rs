//! Applying a transformation matrix to pixels and images, ROI spectra with
//! the three-stage averaging of a measurement session, and the two
//! non-learning bilirubin indices.

use serde::{Deserialize, Serialize};

use crate::calibration::TransformationMatrix;
use crate::error::{Error, Result};
use crate::spectral::{
    mean_spectra, RgbImage, RgbTriple, Roi, SpectralCube, Spectrum,
};

#[inline]
fn apply_row(row: &[f64; 3], r: f64, g: f64, b: f64) -> f64 {
    row[0] * r + row[1] * g + row[2] * b
}

pub fn reconstruct_pixel(tm: &TransformationMatrix, rgb: RgbTriple) -> Spectrum {
    let values = tm
        .rows()
        .iter()
        .map(|row| apply_row(row, rgb.r, rgb.g, rgb.b))
        .collect();
    Spectrum::new(tm.grid().clone(), values).expect("finite matrix times finite RGB")
}

/// Per-pixel reconstruction into a band-sequential cube.
pub fn reconstruct_image(tm: &TransformationMatrix, image: &RgbImage) -> SpectralCube {
    let n = image.width() * image.height();
    let pixels = image.pixels();
    let mut data = vec![0.0; n * tm.band_count()];
    for (row, plane) in tm.rows().iter().zip(data.chunks_exact_mut(n)) {
        for (out, p) in plane.iter_mut().zip(pixels) {
            *out = apply_row(row, p.r, p.g, p.b);
        }
    }
    SpectralCube::new(image.width(), image.height(), tm.grid().clone(), data)
        .expect("dimensions consistent by construction")
}

/// Per-band mean over the ROI.
pub fn extract_roi_spectrum(cube: &SpectralCube, roi: Roi) -> Result<Spectrum> {
    roi.check(cube.width(), cube.height())?;
    let count = roi.pixel_count() as f64;
    let values = (0..cube.grid().len())
        .map(|band| {
            let plane = cube.plane(band);
            let mut sum = 0.0;
            for y in roi.y..roi.y + roi.side {
                let start = y * cube.width() + roi.x;
                for v in &plane[start..start + roi.side] {
                    sum += v;
                }
            }
            sum / count
        })
        .collect();
    Spectrum::new(cube.grid().clone(), values)
}

/// Reconstructs only the ROI pixels. Bit-identical to
/// `extract_roi_spectrum(&reconstruct_image(tm, image), roi)`.
pub fn reconstruct_roi(tm: &TransformationMatrix, image: &RgbImage, roi: Roi) -> Result<Spectrum> {
    roi.check(image.width(), image.height())?;
    let count = roi.pixel_count() as f64;
    let values = tm
        .rows()
        .iter()
        .map(|row| {
            let mut sum = 0.0;
            for y in roi.y..roi.y + roi.side {
                for x in roi.x..roi.x + roi.side {
                    let p = image.get(x, y);
                    sum += apply_row(row, p.r, p.g, p.b);
                }
            }
            sum / count
        })
        .collect();
    Spectrum::new(tm.grid().clone(), values)
}

#[derive(Clone, Debug, PartialEq)]
pub enum SnapshotSource {
    Rgb(RgbImage),
    Cube(SpectralCube),
}

impl SnapshotSource {
    fn dims(&self) -> (usize, usize) {
        match self {
            SnapshotSource::Rgb(img) => (img.width(), img.height()),
            SnapshotSource::Cube(c) => (c.width(), c.height()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub source: SnapshotSource,
    pub rois: Vec<Roi>,
}

/// Snapshots of one subject, each with its own ROI list.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSession {
    snapshots: Vec<Snapshot>,
}

impl MeasurementSession {
    pub fn new(snapshots: Vec<Snapshot>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::EmptyInput("session snapshots"));
        }
        for snap in &snapshots {
            if snap.rois.is_empty() {
                return Err(Error::EmptyInput("snapshot ROIs"));
            }
            let (w, h) = snap.source.dims();
            for roi in &snap.rois {
                roi.check(w, h)?;
            }
        }
        Ok(Self { snapshots })
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }
}

/// Mean of snapshot means of ROI means. Every snapshot weighs the same
/// regardless of how many ROIs it has.
pub fn aggregate_session(session: &MeasurementSession, tm: &TransformationMatrix) -> Result<Spectrum> {
    let per_snapshot = session
        .snapshots
        .iter()
        .map(|snap| {
            let rois = snap
                .rois
                .iter()
                .map(|&roi| match &snap.source {
                    SnapshotSource::Rgb(img) => reconstruct_roi(tm, img, roi),
                    SnapshotSource::Cube(cube) => extract_roi_spectrum(cube, roi),
                })
                .collect::<Result<Vec<_>>>()?;
            mean_spectra(&rois)
        })
        .collect::<Result<Vec<_>>>()?;
    mean_spectra(&per_snapshot)
}

/// Thresholds for rejecting pupil, vessel and glare regions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoiQualityPolicy {
    pub max_mean_rgb: f64,
    pub min_mean_rgb: f64,
    pub max_saturated_fraction: f64,
}

impl Default for RoiQualityPolicy {
    fn default() -> Self {
        Self {
            max_mean_rgb: 240.0,
            min_mean_rgb: 30.0,
            max_saturated_fraction: 0.01,
        }
    }
}

impl RoiQualityPolicy {
    pub fn new(max_mean_rgb: f64, min_mean_rgb: f64, max_saturated_fraction: f64) -> Result<Self> {
        if !(0.0 <= min_mean_rgb && min_mean_rgb < max_mean_rgb && max_mean_rgb <= 255.0) {
            return Err(Error::InvalidValue(
                "quality policy needs 0 <= min < max <= 255".into(),
            ));
        }
        if !(0.0..=1.0).contains(&max_saturated_fraction) {
            return Err(Error::InvalidValue(
                "saturated fraction must lie in [0, 1]".into(),
            ));
        }
        Ok(Self {
            max_mean_rgb,
            min_mean_rgb,
            max_saturated_fraction,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RejectReason {
    HyperReflective,
    UnderIlluminated,
    Saturated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoiVerdict {
    Accept,
    Reject(RejectReason),
}

pub fn check_roi_quality(image: &RgbImage, roi: Roi, policy: &RoiQualityPolicy) -> Result<RoiVerdict> {
    roi.check(image.width(), image.height())?;
    let mut max_sum = 0.0;
    let mut saturated = 0usize;
    for y in roi.y..roi.y + roi.side {
        for x in roi.x..roi.x + roi.side {
            let p = image.get(x, y);
            max_sum += p.max_channel();
            if p.max_channel() >= 255.0 {
                saturated += 1;
            }
        }
    }
    let n = roi.pixel_count() as f64;
    let mean_max = max_sum / n;
    let verdict = if mean_max > policy.max_mean_rgb {
        RoiVerdict::Reject(RejectReason::HyperReflective)
    } else if mean_max < policy.min_mean_rgb {
        RoiVerdict::Reject(RejectReason::UnderIlluminated)
    } else if saturated as f64 / n > policy.max_saturated_fraction {
        RoiVerdict::Reject(RejectReason::Saturated)
    } else {
        RoiVerdict::Accept
    };
    Ok(verdict)
}

/// `(reference - s) / reference` at the band nearest `nm`. Both spectra are
/// expected to be normalized at 680 nm already.
pub fn reflectance_reduction(s: &Spectrum, reference: &Spectrum, nm: f64) -> Result<f64> {
    if s.grid() != reference.grid() {
        return Err(Error::GridMismatch);
    }
    let r = reference.band_value(nm)?;
    if r <= 0.0 {
        return Err(Error::DegenerateNormalizer { band: nm, value: r });
    }
    Ok((r - s.band_value(nm)?) / r)
}

/// Ratio of reflectance at 460 nm to 500 nm.
pub fn two_band_index(s: &Spectrum) -> Result<f64> {
    let denom = s.band_value(500.0)?;
    if denom <= 0.0 {
        return Err(Error::DegenerateNormalizer {
            band: 500.0,
            value: denom,
        });
    }
    Ok(s.band_value(460.0)? / denom)
}
