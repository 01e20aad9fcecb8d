// Reconstruct a small phantom photo into a cube and read back ROI spectra.

use speccam::calibration::wiener_tm;
use speccam::formats::{decode_cube, encode_cube};
use speccam::phantom::{generate_chart_scene, phantom_chart, phantom_reflectance, render_rgb, CameraModel, DatasetOptions, PhantomSpec};
use speccam::reconstruction::{extract_roi_spectrum, reconstruct_image};
use speccam::spectral::{RgbImage, Roi, Spectrum};

pub fn run_example() -> speccam::Result<Vec<Spectrum>> {
    let chart = phantom_chart(&DatasetOptions::default())?;
    let camera = CameraModel::noiseless();
    let (_, truth) = generate_chart_scene(&chart, &camera, 8)?;
    let tm = wiener_tm(&truth, &chart)?;

    // left half clear, right half heavily jaundiced
    let clear = render_rgb(&camera, &phantom_reflectance(&PhantomSpec::new(0.5, 0.2)?)?);
    let yellow = render_rgb(&camera, &phantom_reflectance(&PhantomSpec::new(20.0, 0.2)?)?);
    let photo = RgbImage::from_fn(64, 32, |x, _| if x < 32 { clear } else { yellow })?;

    let cube = reconstruct_image(&tm, &photo);
    let bytes = encode_cube(&cube);
    let cube = decode_cube(&bytes)?;
    println!("cube {}x{}x{} ({} bytes)", cube.width(), cube.height(), cube.grid().len(), bytes.len());

    let mut out = Vec::new();
    for (label, roi) in [("clear", Roi::new(4, 4, 16)?), ("jaundiced", Roi::new(40, 4, 16)?)] {
        let s = extract_roi_spectrum(&cube, roi)?;
        println!("{label:>10}: R460 {:.3}  R560 {:.3}  R680 {:.3}", s.band_value(460.0)?, s.band_value(560.0)?, s.band_value(680.0)?);
        out.push(s);
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("reconstruction runs");
}
