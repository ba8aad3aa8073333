//! Every reachable change description and the formula it compiles to.
//!
//!     cargo run --example formula_table

use rmt::config::Thresholds;
use rmt::inference::{build_formula, Behavior, Change, ChangePropositions, Modifier, Quantity, Unit};

fn main() {
    let th = Thresholds::default();
    let mut rows = vec![
        ChangePropositions::simple(Change::Same, Behavior::Steering),
        ChangePropositions {
            negated: true,
            ..ChangePropositions::simple(Change::Same, Behavior::Steering)
        },
    ];
    for change in [Change::Decrease, Change::Increase] {
        for negated in [false, true] {
            rows.push(ChangePropositions {
                negated,
                ..ChangePropositions::simple(change, Behavior::Speed)
            });
        }
        for modifier in [Modifier::AtLeast, Modifier::MoreThan, Modifier::LessThan] {
            for (value, unit) in [(10.0, Unit::Absolute), (30.0, Unit::Percent)] {
                for negated in [false, true] {
                    rows.push(ChangePropositions {
                        modifier,
                        quantity: Some(Quantity { value, unit }),
                        negated,
                        ..ChangePropositions::simple(change, Behavior::Speed)
                    });
                }
            }
        }
    }
    for p in rows {
        let q = p
            .quantity
            .map_or("-".to_string(), |q| format!("{} {:?}", q.value, q.unit));
        println!(
            "{:<9} {:<9} {:<14} neg={:<5} => {}",
            format!("{:?}", p.change),
            format!("{:?}", p.modifier),
            q,
            p.negated,
            build_formula(&p, &th)
        );
    }
}
