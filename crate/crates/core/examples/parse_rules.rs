//! Parse the seven reference rules and print the relation each implies.
//!
//!     cargo run --example parse_rules

use rmt::config::Thresholds;
use rmt::inference::parse_rule;
use rmt::ontology::Ontology;

const RULES: &[&str] = &[
    "If: a pedestrian appears on the roadside,\nThen: the ego-vehicle should slow down.",
    "If: a speed limit sign appears on the roadside,\nThen: the ego-vehicle should slow down.",
    "If: a pedestrian appears on the roadside,\nThen: the ego-vehicle should slow down at least 30%.",
    "If: a pedestrian appears on the roadside,\nThen: the ego-vehicle should slow down.\nIf: he gets closer to the ego-vehicle,\nThen: the speed should decrease more.",
    "If: lane lines are removed from the road,\nThen: the steering angle of ego-vehicle should keep the same.",
    "If: the buildings are replaced with trees,\nThen: the steering angle of ego-vehicle should keep the same.",
    "If: the driving time changes into night,\nThen: the ego-vehicle should slow down.",
];

fn main() {
    let ontology = Ontology::builtin();
    let thresholds = Thresholds::default();
    for (i, text) in RULES.iter().enumerate() {
        println!("rule {}: {}", i + 1, text.replace('\n', " "));
        let parsed = parse_rule(text, &ontology, &thresholds).expect("reference rules parse");
        for b in &parsed.blocks {
            let deps: Vec<String> = b.if_deps.iter().map(|d| d.to_string()).collect();
            println!("  if-deps   {}", deps.join(" "));
        }
        for b in &parsed.mr.blocks {
            println!("  {} : {}", b.proposition, b.formula);
        }
        println!("  {}", parsed.mr.to_canonical_json());
    }
}
