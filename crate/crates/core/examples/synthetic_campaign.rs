//! Generate and validate a campaign over procedurally generated label maps
//! with the built-in engines and an analytic model.
//!
//!     cargo run --example synthetic_campaign -- [n_maps]

use std::path::Path;

use rmt::config::Config;
use rmt::engines::image_id;
use rmt::harness::{run_generation, run_validation, ModelSpec, Predictions};
use rmt::inference::Behavior;
use rmt::scene::{load_map, synthetic_gallery, write_synthetic_dataset, SceneParams};

const RULE: &str = "If: a pedestrian appears on the roadside,\nThen: the ego-vehicle should slow down.";

fn speed(path: &Path) -> f64 {
    let map = load_map(path).expect("readable map");
    60.0 * (1.0 - (4.0 * map.count("pedestrian") as f64 / map.len() as f64).min(1.0))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map_or(Ok(40), |s| s.parse())?;
    let root = tempfile::tempdir()?;
    let (data, gallery_dir, out) = (root.path().join("data"), root.path().join("gallery"), root.path().join("out"));
    std::fs::create_dir_all(&data)?;
    let params = SceneParams::default();
    write_synthetic_dataset(&data, n, &params, 11)?;
    synthetic_gallery(params.height).save(&gallery_dir)?;

    let mut config = Config {
        gallery: Some(gallery_dir),
        ..Config::default()
    };
    let (parsed, campaign) = run_generation(&config, RULE, &data, &out)?;
    for b in &parsed.mr.blocks {
        println!("{} : {}", b.proposition, b.formula);
    }
    println!("{} of {} cases generated", campaign.generated(), campaign.cases.len());

    // Predictions for every image the manifest mentions.
    let mut preds = Predictions::default();
    for c in campaign.cases.iter().filter(|c| c.status.is_generated()) {
        for p in std::iter::once(&c.source).chain(&c.followups) {
            preds.insert(&image_id(p), Behavior::Speed, speed(p));
        }
    }
    let csv_path = out.join("predictions.csv");
    std::fs::write(&csv_path, preds.to_csv())?;
    config.model = Some(ModelSpec {
        command: None,
        predictions_csv: Some(csv_path),
    });

    let report = run_validation(&config, &campaign.manifest)?;
    print!("{}", report.to_text());
    Ok(())
}
