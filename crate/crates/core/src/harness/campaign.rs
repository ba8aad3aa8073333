//! End-to-end campaigns and threshold sweeps.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::evaluate::{validate_cases, ViolationReport};
use super::predict::{collect_predictions, Predictions};
use super::HarnessError;
use crate::config::Config;
use crate::engines::{
    discover_sources, generate_campaign, read_manifest, Campaign, EngineContext, GeneratedCase,
    SourceCase,
};
use crate::inference::{fmt_number, parse_rule, MetamorphicRelation, ParsedRule, TransformationKind};
use crate::scene::{extract_mask, load_map, MaskGallery};
use crate::util::write_atomic;

/// Masks from the configured gallery directory, or else cut from the
/// dataset's own label maps for each element in `elements`.
pub fn build_gallery(
    config: &Config,
    sources: &[SourceCase],
    elements: &[String],
) -> Result<MaskGallery, HarnessError> {
    if let Some(dir) = &config.gallery {
        return Ok(MaskGallery::load(dir)?);
    }
    let mut gallery = MaskGallery::default();
    if elements.is_empty() {
        return Ok(gallery);
    }
    for s in sources {
        let map = load_map(&s.map)?;
        for e in elements {
            if map.class_id(e).is_none() {
                continue;
            }
            if let Some(mut mask) = extract_mask(&map, e)? {
                mask.source_id = s.id.clone();
                gallery.insert(mask);
            }
        }
    }
    Ok(gallery)
}

fn rule_path(dir: &Path) -> PathBuf {
    dir.join("rule.txt")
}

/// Parse a rule and generate its follow-ups under `out_dir`. The rule text
/// is kept next to the manifest for validation.
pub fn run_generation(
    config: &Config,
    rule_text: &str,
    dataset_dir: &Path,
    out_dir: &Path,
) -> Result<(ParsedRule, Campaign), HarnessError> {
    let parsed = parse_rule(rule_text, &config.ontology, &config.thresholds)?;
    for w in &parsed.warnings {
        log::warn!("{w}");
    }
    let sources = discover_sources(dataset_dir)?;
    let mut addable: Vec<String> = parsed
        .mr
        .blocks
        .iter()
        .filter(|b| b.proposition.kind == TransformationKind::Add)
        .map(|b| b.proposition.target.element.name.clone())
        .collect();
    addable.dedup();
    let gallery = build_gallery(config, &sources, &addable)?;
    let ctx = EngineContext {
        thresholds: &config.thresholds,
        gallery: &gallery,
    };
    let campaign = generate_campaign(&config.registry, &parsed.mr, dataset_dir, out_dir, ctx, config.workers)?;
    let rule = rule_path(out_dir);
    write_atomic(&rule, format!("{}\n", rule_text.trim()).as_bytes()).map_err(|e| HarnessError::io(&rule, e))?;
    Ok((parsed, campaign))
}

fn check_propositions(mr: &MetamorphicRelation, cases: &[GeneratedCase]) -> Result<(), HarnessError> {
    let expected = serde_json::Value::Array(mr.blocks.iter().map(|b| b.proposition.to_json()).collect());
    match cases.iter().find(|c| c.proposition != expected) {
        Some(c) => Err(HarnessError::RuleMismatch(format!(
            "case {} was generated for {} but the rule now yields {}",
            c.case_id, c.proposition, expected
        ))),
        None => Ok(()),
    }
}

/// Manifest plus the rule and relation it was generated for.
pub struct LoadedCampaign {
    pub dir: PathBuf,
    pub rule_text: String,
    pub mr: MetamorphicRelation,
    pub cases: Vec<GeneratedCase>,
}

pub fn load_campaign(config: &Config, manifest: &Path) -> Result<LoadedCampaign, HarnessError> {
    let cases = read_manifest(manifest)?;
    let dir = manifest.parent().unwrap_or(Path::new(".")).to_path_buf();
    let rp = rule_path(&dir);
    let rule_text = std::fs::read_to_string(&rp).map_err(|e| HarnessError::io(&rp, e))?;
    let mr = parse_rule(&rule_text, &config.ontology, &config.thresholds)?.mr;
    check_propositions(&mr, &cases)?;
    Ok(LoadedCampaign {
        dir,
        rule_text,
        mr,
        cases,
    })
}

/// Predict, evaluate and write `report.json` / `report.txt` next to the
/// manifest.
pub fn run_validation(config: &Config, manifest: &Path) -> Result<ViolationReport, HarnessError> {
    let c = load_campaign(config, manifest)?;
    let model = config.model()?;
    let predictions = collect_predictions(&c.cases, model, &[c.mr.behavior()], &c.dir)?;
    let report = validate_cases(&c.mr, &c.cases, &predictions)?;
    report.write(&c.dir)?;
    Ok(report)
}

/// Parse, generate, predict, evaluate, report.
pub fn run_campaign(
    config: &Config,
    rule_text: &str,
    dataset_dir: &Path,
    out_dir: &Path,
) -> Result<ViolationReport, HarnessError> {
    let (_, campaign) = run_generation(config, rule_text, dataset_dir, out_dir)?;
    run_validation(config, &campaign.manifest)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub threshold: f64,
    pub violations: usize,
    pub evaluated: usize,
    pub ratio: Option<f64>,
}

/// Rule text for one threshold. Templates without an "If" replace the
/// then-clause of the last block of `base_rule`.
pub fn instantiate_template(
    config: &Config,
    base_rule: &str,
    template: &str,
    threshold: f64,
) -> Result<String, HarnessError> {
    if !template.contains("{T}") {
        return Err(HarnessError::Template(format!("{template:?} has no {{T}} placeholder")));
    }
    let filled = template.replace("{T}", &fmt_number(threshold));
    let has_if = filled
        .split(|c: char| !c.is_alphanumeric())
        .any(|w| w.eq_ignore_ascii_case("if"));
    if has_if {
        return Ok(filled);
    }
    let blocks = crate::inference::analyze_rule(base_rule, &config.ontology)
        .map_err(crate::inference::InferenceError::from)?;
    let n = blocks.len();
    Ok(blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let then = if i + 1 == n { filled.as_str() } else { b.block.then_text.as_str() };
            format!("If: {},\nThen: {}.", b.block.if_text, then)
        })
        .collect::<Vec<_>>()
        .join("\n"))
}

/// One report row per threshold over fixed cases and predictions.
pub fn sweep_with_predictions(
    config: &Config,
    base_rule: &str,
    template: &str,
    thresholds: &[f64],
    cases: &[GeneratedCase],
    predictions: &Predictions,
) -> Result<Vec<SweepRow>, HarnessError> {
    thresholds
        .iter()
        .map(|&t| {
            let rule = instantiate_template(config, base_rule, template, t)?;
            let mr = parse_rule(&rule, &config.ontology, &config.thresholds)?.mr;
            check_propositions(&mr, cases)?;
            let report = validate_cases(&mr, cases, predictions)?;
            Ok(SweepRow {
                threshold: t,
                violations: report.n_violations,
                evaluated: report.n_evaluated,
                ratio: report.ratio(),
            })
        })
        .collect()
}

/// Re-evaluate a generated campaign at several thresholds, collecting
/// predictions once.
pub fn threshold_sweep(
    config: &Config,
    manifest: &Path,
    template: &str,
    thresholds: &[f64],
) -> Result<Vec<SweepRow>, HarnessError> {
    let c = load_campaign(config, manifest)?;
    let model = config.model()?;
    let predictions = collect_predictions(&c.cases, model, &[c.mr.behavior()], &c.dir)?;
    sweep_with_predictions(config, &c.rule_text, template, thresholds, &c.cases, &predictions)
}

/// CSV text of sweep rows; ratio left empty when undefined.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["threshold", "violations", "evaluated", "ratio"])
        .expect("in-memory csv");
    for r in rows {
        w.write_record([
            fmt_number(r.threshold),
            r.violations.to_string(),
            r.evaluated.to_string(),
            r.ratio.map_or(String::new(), |x| x.to_string()),
        ])
        .expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}
