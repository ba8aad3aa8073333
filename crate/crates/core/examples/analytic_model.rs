//! A stand-in driving model usable as `model.command`. It reads a file
//! listing one label map per line and prints prediction CSV: speed falls
//! linearly with the pedestrian share of the frame, steering is zero.
//!
//!     cargo run --example analytic_model -- inputs.txt

use std::path::Path;

use rmt::scene::load_map;

pub fn predict_speed(path: &Path) -> Result<f64, rmt::scene::SceneError> {
    let map = load_map(path)?;
    let fraction = map.count("pedestrian") as f64 / map.len() as f64;
    Ok(60.0 * (1.0 - (4.0 * fraction).min(1.0)))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let list = std::env::args().nth(1).ok_or("usage: analytic_model <file-list>")?;
    let mut out = csv::Writer::from_writer(std::io::stdout());
    out.write_record(["image_id", "behavior", "value"])?;
    for line in std::fs::read_to_string(&list)?.lines().filter(|l| !l.trim().is_empty()) {
        let path = Path::new(line.trim());
        let id = rmt::engines::image_id(path);
        out.write_record([id.as_str(), "speed", &predict_speed(path)?.to_string()])?;
        out.write_record([id.as_str(), "steering", "0"])?;
    }
    out.flush()?;
    Ok(())
}
