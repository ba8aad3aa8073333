use proptest::prelude::*;

use rmt::config::Thresholds;
use rmt::engines::{CaseStatus, GeneratedCase};
use rmt::harness::{validate_cases, Predictions};
use rmt::inference::{
    analyze_rule, build_formula, parse_rule, Behavior, Change, ChangePropositions, Evaluation, Lhs,
    Modifier, Op, Quantity, Unit,
};
use rmt::ontology::{match_element, parse_document, wup_similarity, Ontology};
use rmt::rule_lang::{pos_tag, render, root_index, tokenize, extract_dependencies, Pos, Token};
use rmt::scene::{apply_remove, apply_replace, synthetic_scene, SceneParams};

const SUBJECTS: &[&str] = &["pedestrian", "car", "speed limit sign", "tree", "bicyclist", "person", "truck"];
const ADJECTIVES: &[&str] = &["", "black ", "small ", "red "];
const VERBS: &[&str] = &["appears", "is added", "shows up", "stands"];
const PREPS: &[&str] = &["on", "in front of", "behind", "near"];
const PLACES: &[&str] = &["roadside", "road", "sidewalk", "lane", "ego-vehicle"];
const THENS: &[&str] = &[
    "the ego-vehicle should slow down",
    "the ego-vehicle should slow down at least 20%",
    "the speed should not increase more than 5 km/h",
    "the steering angle should keep the same",
    "the ego-vehicle should speed up less than 10%",
];

fn clause() -> impl Strategy<Value = String> {
    (
        prop::sample::select(ADJECTIVES),
        prop::sample::select(SUBJECTS),
        prop::sample::select(VERBS),
        prop::sample::select(PREPS),
        prop::sample::select(PLACES),
    )
        .prop_map(|(a, s, v, p, o)| format!("a {a}{s} {v} {p} the {o}"))
}

fn rule() -> impl Strategy<Value = String> {
    (clause(), prop::sample::select(THENS)).prop_map(|(c, t)| format!("If: {c},\nThen: {t}."))
}

fn concepts() -> Vec<String> {
    Ontology::builtin().taxonomy().concepts().map(String::from).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tokens_survive_render(text in clause()) {
        let a = tokenize(&text);
        let b = tokenize(&render(&a));
        let ta: Vec<_> = a.iter().map(|t| &t.text).collect();
        let tb: Vec<_> = b.iter().map(|t| &t.text).collect();
        prop_assert_eq!(ta, tb);
    }

    #[test]
    fn parsing_is_deterministic(text in rule()) {
        let o = Ontology::builtin();
        let a = analyze_rule(&text, &o).unwrap();
        let b = analyze_rule(&text, &o).unwrap();
        let dump = |blocks: &[rmt::inference::ParsedBlock]| {
            blocks.iter().flat_map(|b| b.if_deps.iter().chain(&b.then_deps))
                .map(|d| serde_json::to_string(d).unwrap()).collect::<Vec<_>>()
        };
        prop_assert_eq!(dump(&a), dump(&b));
        let th = Thresholds::default();
        let (x, y) = (parse_rule(&text, &o, &th), parse_rule(&text, &o, &th));
        prop_assert_eq!(x.map(|p| p.mr.to_canonical_json()), y.map(|p| p.mr.to_canonical_json()));
    }

    #[test]
    fn head_chains_reach_the_root(text in clause()) {
        let lex = Ontology::builtin().pos_lexicon();
        let tagged: Vec<Token> = pos_tag(&tokenize(&text), &lex);
        let root = root_index(&tagged).unwrap();
        prop_assert_eq!(tagged.iter().position(|t| t.pos == Pos::Verb), Some(root));
        let deps = extract_dependencies(&tagged).unwrap();
        for d in &deps {
            let mut head = d.head.index;
            let mut steps = 0;
            while head != tagged[root].index {
                let up = deps.iter().find(|e| e.dependent.index == head);
                prop_assert!(up.is_some(), "{} has no way up from {}", d, head);
                head = up.unwrap().head.index;
                steps += 1;
                prop_assert!(steps < tagged.len(), "cycle at {}", d);
            }
        }
    }

    #[test]
    fn wup_is_symmetric_and_bounded(i in 0usize..400, j in 0usize..400) {
        let cs = concepts();
        let (a, b) = (&cs[i % cs.len()], &cs[j % cs.len()]);
        let t = Ontology::builtin();
        let s = wup_similarity(a, b, t.taxonomy()).unwrap();
        prop_assert_eq!(s, wup_similarity(b, a, t.taxonomy()).unwrap());
        prop_assert!(s > 0.0 && s <= 1.0);
        prop_assert_eq!(s == 1.0, a == b);
    }

    #[test]
    fn matching_is_threshold_monotone(i in 0usize..400, lo in 0.0f64..1.0, hi in 0.0f64..1.0) {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let o = Ontology::builtin();
        let cs = concepts();
        let word = &cs[i % cs.len()];
        let noun = Token::new(word.as_str(), word.as_str(), Pos::Noun, 0);
        let a = match_element(&noun, &o, lo);
        prop_assert_eq!(&a, &match_element(&noun, &o, lo));
        if let Some(b) = match_element(&noun, &o, hi) {
            prop_assert_eq!(Some(b.element.name), a.map(|m| m.element.name));
        }
    }

    #[test]
    fn negation_swaps_bounds(
        change in prop::sample::select(vec![Change::Increase, Change::Decrease]),
        modifier in prop::sample::select(vec![Modifier::AtLeast, Modifier::MoreThan, Modifier::LessThan]),
        unit in prop::sample::select(vec![Unit::Absolute, Unit::Percent]),
        value in 0.0f64..100.0,
    ) {
        let th = Thresholds::default();
        let p = ChangePropositions {
            modifier,
            quantity: Some(Quantity { value, unit }),
            ..ChangePropositions::simple(change, Behavior::Speed)
        };
        let plain = build_formula(&p, &th).conjuncts;
        let neg = build_formula(&ChangePropositions { negated: true, ..p }, &th).conjuncts;
        let flipped: Vec<_> = plain
            .iter()
            .filter(|c| !(c.op == Op::Gt && c.rhs == 0.0))
            .map(|c| (c.lhs, match c.op { Op::Ge => Op::Le, Op::Le => Op::Ge, o => o }, c.rhs))
            .collect();
        let neg: Vec<_> = neg.iter().map(|c| (c.lhs, c.op, c.rhs)).collect();
        prop_assert_eq!(neg, flipped);
    }

    #[test]
    fn percent_forms_ignore_scale(
        change in prop::sample::select(vec![Change::Increase, Change::Decrease]),
        modifier in prop::sample::select(vec![Modifier::AtLeast, Modifier::LessThan]),
        negated: bool,
        value in 0.0f64..80.0,
        x1 in 0.5f64..100.0, x2 in 0.0f64..100.0, c in 0.01f64..100.0,
    ) {
        let p = ChangePropositions {
            modifier,
            quantity: Some(Quantity { value, unit: Unit::Percent }),
            negated,
            ..ChangePropositions::simple(change, Behavior::Speed)
        };
        let f = build_formula(&p, &Thresholds::default());
        prop_assume!(f.conjuncts.iter().all(|k| matches!(k.lhs, Lhs::RelDrop | Lhs::RelRise) || k.rhs == 0.0));
        // Stay clear of the boundary, where rounding decides.
        for k in &f.conjuncts {
            let v = k.lhs.eval(x1, x2).unwrap();
            prop_assume!((v - k.rhs).abs() > 1e-9);
        }
        let holds = |a: f64, b: f64| f.evaluate(a, b) == Evaluation::Holds;
        prop_assert_eq!(holds(x1, x2), holds(c * x1, c * x2));
    }

    #[test]
    fn edits_conserve_pixels(seed in 0u64..10_000, class in prop::sample::select(vec!["line", "building", "tree", "vehicle", "pedestrian"])) {
        let m = synthetic_scene(&SceneParams::default(), seed);
        prop_assume!(m.count(class) > 0);
        let r = apply_remove(&m, class).unwrap();
        prop_assert_eq!(r.count(class), 0);
        prop_assert_eq!(r.count("road"), m.count("road") + m.count(class));
        let into = if class == "tree" { "building" } else { "tree" };
        let p = apply_replace(&m, class, into).unwrap();
        prop_assert_eq!(p.count(into), m.count(into) + m.count(class));
        for y in 0..m.height {
            for x in 0..m.width {
                if m.class_name(m.get(x, y)) != Some(class) {
                    prop_assert_eq!(m.class_name(m.get(x, y)), r.class_name(r.get(x, y)));
                }
            }
        }
    }

    #[test]
    fn report_arithmetic(xs in prop::collection::vec((0.0f64..100.0, 0.0f64..100.0, any::<bool>()), 0..80)) {
        let o = Ontology::builtin();
        let mr = parse_rule(
            "If: a pedestrian appears on the roadside,\nThen: the ego-vehicle should slow down at least 10%.",
            &o,
            &Thresholds::default(),
        ).unwrap().mr;
        let prop_json = serde_json::Value::Array(mr.blocks.iter().map(|b| b.proposition.to_json()).collect());
        let mut preds = Predictions::default();
        let cases: Vec<GeneratedCase> = xs.iter().enumerate().map(|(i, &(a, b, generated))| {
            let id = format!("c{i}");
            preds.insert(&id, Behavior::Speed, a);
            preds.insert(&format!("{id}__g1"), Behavior::Speed, b);
            GeneratedCase {
                case_id: id.clone(),
                source: format!("{id}.pgm").into(),
                followups: if generated { vec![format!("{id}__g1.pgm").into()] } else { vec![] },
                proposition: prop_json.clone(),
                status: if generated { CaseStatus::Generated } else { CaseStatus::Filtered(rmt::scene::FilterReason::NoPosition) },
            }
        }).collect();
        let r = validate_cases(&mr, &cases, &preds).unwrap();
        prop_assert!(r.n_violations <= r.n_evaluated);
        prop_assert_eq!(r.n_evaluated + r.n_filtered, r.n_cases);
        let json = r.to_json();
        match r.ratio() {
            Some(q) => {
                let stored = json["ratio"].as_f64().unwrap();
                prop_assert!((stored - r.n_violations as f64 / r.n_evaluated as f64).abs() < 1e-12);
                prop_assert!((stored - q).abs() < 1e-12);
            }
            None => {
                prop_assert_eq!(r.n_evaluated, 0);
                prop_assert!(json["ratio"].is_null());
            }
        }
        // Scaling every prediction leaves percent verdicts alone.
        let mut scaled = Predictions::default();
        for (i, &(a, b, _)) in xs.iter().enumerate() {
            scaled.insert(&format!("c{i}"), Behavior::Speed, a * 3.5);
            scaled.insert(&format!("c{i}__g1"), Behavior::Speed, b * 3.5);
        }
        let s = validate_cases(&mr, &cases, &scaled).unwrap();
        let near_boundary = xs.iter().any(|&(a, b, _)| a > 0.0 && ((a - b) / a - 0.1).abs() < 1e-9);
        if !near_boundary {
            let v = |r: &rmt::harness::ViolationReport| r.verdicts.iter().map(|v| v.verdict).collect::<Vec<_>>();
            prop_assert_eq!(v(&r), v(&s));
        }
    }
}

#[test]
fn ontology_round_trips_through_yaml() {
    let doc = "ontology:\n  elements:\n    - name: animal\n      category: Object\n      subcategory: DynamicObject/Animal\n      aliases: [critter, deer]\n  taxonomy:\n    - { parent: animal, children: [moose] }\n  lexicon:\n    emerge: [{ target: add, score: 0.8 }]\n";
    let merged = Ontology::load(doc).unwrap();
    let again = Ontology::from_document(&parse_document(&merged.to_yaml()).unwrap()).unwrap();
    assert_eq!(merged.elements(), again.elements());
    assert_eq!(merged.taxonomy(), again.taxonomy());
    assert_eq!(merged.lexicon(), again.lexicon());
}
