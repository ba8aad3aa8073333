//! Sweep the "at least T%" threshold of a slow-down rule over one set of
//! predictions.
//!
//!     cargo run --example threshold_sweep

use rmt::config::Config;
use rmt::engines::{image_id, CaseStatus, GeneratedCase};
use rmt::harness::{sweep_csv, sweep_with_predictions, Predictions};
use rmt::inference::{parse_rule, Behavior};
use rand::{Rng, SeedableRng};

const BASE: &str = "If: a pedestrian appears on the roadside,\nThen: the ego-vehicle should slow down at least 30%.";
const TEMPLATE: &str = "the ego-vehicle should slow down at least {T}%";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = Config::default();
    let mr = parse_rule(BASE, &config.ontology, &config.thresholds)?.mr;
    let proposition = serde_json::Value::Array(mr.blocks.iter().map(|b| b.proposition.to_json()).collect());

    // Made-up predictions: the model slows down by a random share.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let mut preds = Predictions::default();
    let cases: Vec<GeneratedCase> = (0..200)
        .map(|i| {
            let source = format!("/data/case_{i:03}.pgm").into();
            let followup: std::path::PathBuf = format!("/out/followups/case_{i:03}__g1.pgm").into();
            let x1 = rng.gen_range(20.0..80.0);
            preds.insert(&image_id(&followup), Behavior::Speed, x1 * (1.0 - rng.gen_range(0.0..0.6)));
            let c = GeneratedCase {
                case_id: format!("case_{i:03}"),
                source,
                followups: vec![followup],
                proposition: proposition.clone(),
                status: CaseStatus::Generated,
            };
            preds.insert(&image_id(&c.source), Behavior::Speed, x1);
            c
        })
        .collect();

    let thresholds = [0.0, 10.0, 20.0, 30.0, 40.0, 50.0];
    let rows = sweep_with_predictions(&config, BASE, TEMPLATE, &thresholds, &cases, &preds)?;
    print!("{}", sweep_csv(&rows));
    Ok(())
}
