//! Wu-Palmer similarities and noun-to-element matching against the
//! built-in scene ontology, plus a user extension.
//!
//!     cargo run --example ontology_matching

use rmt::ontology::{match_element, wup_similarity, Ontology};
use rmt::rule_lang::{Pos, Token};

fn main() {
    let base = Ontology::builtin();
    let tax = base.taxonomy();
    for (a, b) in [("pedestrian", "pedestrian"), ("person", "pedestrian"), ("car", "vehicle"), ("tree", "building")] {
        match wup_similarity(a, b, tax) {
            Ok(s) => println!("wup({a}, {b}) = {s:.3}"),
            Err(e) => println!("wup({a}, {b}): {e}"),
        }
    }

    // An ontology document only needs the additions.
    let extended = Ontology::load(
        "ontology:\n  elements:\n    - name: animal\n      category: Object\n      subcategory: DynamicObject/Animal\n      aliases: [critter]\n  taxonomy:\n    - { parent: animal, children: [deer] }\n",
    )
    .expect("extension loads");

    for word in ["roadside", "person", "kid", "deer", "night", "cloud"] {
        let noun = Token::new(word, word, Pos::Noun, 0);
        for (name, o) in [("builtin", &base), ("extended", &extended)] {
            match match_element(&noun, o, 0.75) {
                Some(m) => println!(
                    "{name:>8}: {word:<9} -> {} {:?} (similarity {:.2})",
                    m.element.name, m.bound_properties, m.similarity
                ),
                None => println!("{name:>8}: {word:<9} -> no element"),
            }
        }
    }
}
