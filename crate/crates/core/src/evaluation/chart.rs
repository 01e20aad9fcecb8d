//! Calibrate on one chart, reconstruct another, score per-block RMSE.

use serde::{Deserialize, Serialize};

use super::stats::spectral_rmse;
use crate::calibration::{sample_cells, sample_chart, wiener_tm, ColorChart};
use crate::error::Result;
use crate::phantom::{classic_chart, digital_chart, generate_chart_scene, CameraModel, DEFAULT_CELL_PX};
use crate::reconstruction::reconstruct_pixel;
use crate::seed;

/// Inner part of each cell averaged when sampling rendered scenes.
pub const SAMPLING_MARGIN: f64 = 0.25;

/// Pass mark for the mean block RMSE.
pub const CHART_RMSE_LIMIT: f64 = 0.04;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartRmseReport {
    pub calibration_chart: String,
    pub test_chart: String,
    pub per_block: Vec<(String, f64)>,
    pub mean: f64,
    pub max: f64,
}

impl ChartRmseReport {
    pub fn passed(&self) -> bool {
        self.mean < CHART_RMSE_LIMIT
    }
}

/// Calibrates from a rendered `calibration` chart scene and reconstructs every
/// block of a rendered `test` scene, both under `camera` (noise seeds differ).
pub fn cross_chart_rmse(
    calibration: &ColorChart,
    test: &ColorChart,
    camera: &CameraModel,
    seed: u64,
) -> Result<ChartRmseReport> {
    let cal_cam = camera.clone().with_seed(seed::derive_seed(seed, "calibration-scene"));
    let test_cam = camera.clone().with_seed(seed::derive_seed(seed, "test-scene"));
    let (cal_img, _) = generate_chart_scene(calibration, &cal_cam, DEFAULT_CELL_PX)?;
    let samples = sample_chart(&cal_img, calibration, calibration.layout(), SAMPLING_MARGIN)?;
    let tm = wiener_tm(&samples, calibration)?;
    let (test_img, _) = generate_chart_scene(test, &test_cam, DEFAULT_CELL_PX)?;
    let rgb = sample_cells(&test_img, test.layout(), SAMPLING_MARGIN)?;
    let per_block = test
        .blocks()
        .iter()
        .zip(rgb)
        .map(|(b, v)| Ok((b.id.clone(), spectral_rmse(&reconstruct_pixel(&tm, v), &b.reflectance)?)))
        .collect::<Result<Vec<_>>>()?;
    let mean = per_block.iter().map(|p| p.1).sum::<f64>() / per_block.len() as f64;
    let max = per_block.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(ChartRmseReport {
        calibration_chart: calibration.name().to_string(),
        test_chart: test.name().to_string(),
        per_block,
        mean,
        max,
    })
}

/// The default experiment: 24-block chart to 96-block chart.
pub fn default_chart_test(noise_sigma: f64, seed: u64) -> Result<ChartRmseReport> {
    let camera = CameraModel::default().with_noise(noise_sigma);
    cross_chart_rmse(&classic_chart()?, &digital_chart()?, &camera, seed)
}
