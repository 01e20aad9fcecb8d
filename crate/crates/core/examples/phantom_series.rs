// Reflectance at 460 nm across the dilution series, normalised at 680 nm.

use speccam::evaluation::linear_fit;
use speccam::phantom::{phantom_series, PHANTOM_SERIES_MG_DL};
use speccam::reconstruction::reflectance_reduction;
use speccam::spectral::normalize_at;

pub fn run_example() -> speccam::Result<f64> {
    let series = phantom_series()?;
    let normalized = series.iter().map(|s| normalize_at(s, 680.0)).collect::<speccam::Result<Vec<_>>>()?;
    let mut reductions = Vec::new();
    for (c, s) in PHANTOM_SERIES_MG_DL.iter().zip(&normalized) {
        let r = reflectance_reduction(s, &normalized[0], 460.0)?;
        println!("{c:>6.2} mg/dL  R460 {:.4}  reduction {r:.4}", s.band_value(460.0)?);
        reductions.push(r);
    }
    let fit = linear_fit(&PHANTOM_SERIES_MG_DL, &reductions)?;
    println!("linear fit: slope {:.5} per mg/dL, R^2 {:.4}", fit.slope, fit.r_squared);
    Ok(fit.r_squared)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("series runs");
}
