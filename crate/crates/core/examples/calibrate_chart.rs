// Photograph a synthetic 24-block chart, sample it and fit a device profile.

use speccam::calibration::{sample_chart, wiener_tm, DeviceProfile};
use speccam::phantom::{classic_chart, generate_chart_scene, CameraModel};

pub fn run_example() -> speccam::Result<DeviceProfile> {
    let chart = classic_chart()?;
    let (photo, _) = generate_chart_scene(&chart, &CameraModel::default().with_seed(7), 24)?;
    let samples = sample_chart(&photo, &chart, chart.layout(), 0.25)?;
    let tm = wiener_tm(&samples, &chart)?;
    let profile = DeviceProfile {
        device_model: "demo-phone".into(),
        illuminant: "flat".into(),
        chart_name: chart.name().into(),
        tm,
        created_at: "2024-01-01T00:00:00Z".parse().expect("valid timestamp"),
    };
    println!("{} blocks sampled from a {}x{} photo", samples.samples.len(), photo.width(), photo.height());
    for (nm, row) in profile.tm.grid().bands().iter().zip(profile.tm.rows()).step_by(6) {
        println!("{nm:>5} nm  [{:+.5} {:+.5} {:+.5}]", row[0], row[1], row[2]);
    }
    Ok(profile)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("calibration runs");
}
