//! Verdicts and violation reports.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::predict::Predictions;
use super::HarnessError;
use crate::engines::{image_id, GeneratedCase};
use crate::inference::{fmt_number, Evaluation, MetamorphicRelation};
use crate::util::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairVerdict {
    pub case_id: String,
    pub x1: f64,
    pub x2: f64,
    pub x3: Option<f64>,
    pub verdict: Verdict,
    pub failed_conjunct: Option<String>,
    pub degenerate: bool,
}

/// Check every block of `mr`; block k compares predictions k and k+1.
pub fn evaluate_case(
    mr: &MetamorphicRelation,
    case_id: &str,
    x1: f64,
    x2: f64,
    x3: Option<f64>,
) -> Result<PairVerdict, HarnessError> {
    let xs: Vec<f64> = [Some(x1), Some(x2), x3].into_iter().flatten().collect();
    if xs.len() != mr.arity() {
        return Err(HarnessError::ArityMismatch {
            case_id: case_id.to_string(),
            expected: mr.arity(),
            got: xs.len(),
        });
    }
    let mut verdict = PairVerdict {
        case_id: case_id.to_string(),
        x1,
        x2,
        x3,
        verdict: Verdict::Pass,
        failed_conjunct: None,
        degenerate: false,
    };
    for (k, block) in mr.blocks.iter().enumerate() {
        let outcome = block.formula.evaluate(xs[k], xs[k + 1]);
        let failed = match outcome {
            Evaluation::Holds => continue,
            Evaluation::Fails(i) => i,
            Evaluation::Degenerate(i) => {
                verdict.degenerate = true;
                i
            }
        };
        verdict.verdict = Verdict::Violation;
        verdict.failed_conjunct = Some(block.formula.render_conjunct(failed));
        break;
    }
    Ok(verdict)
}

/// Aggregate result of a campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    pub rule_text: String,
    pub n_cases: usize,
    pub n_filtered: usize,
    pub n_evaluated: usize,
    pub n_violations: usize,
    pub verdicts: Vec<PairVerdict>,
}

impl ViolationReport {
    /// Violations per evaluated case; None when nothing was evaluated.
    pub fn ratio(&self) -> Option<f64> {
        (self.n_evaluated > 0).then(|| self.n_violations as f64 / self.n_evaluated as f64)
    }

    pub fn headline(&self) -> String {
        format!(
            "{} violations were found out of {} test cases",
            self.n_violations, self.n_evaluated
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule_text,
            "counts": {
                "cases": self.n_cases,
                "filtered": self.n_filtered,
                "evaluated": self.n_evaluated,
                "violations": self.n_violations,
            },
            "ratio": self.ratio(),
            "verdicts": self.verdicts,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = self.headline();
        s.push('\n');
        let _ = writeln!(s, "rule: {}", self.rule_text.split_whitespace().collect::<Vec<_>>().join(" "));
        let _ = writeln!(
            s,
            "cases: {}, filtered: {}, evaluated: {}",
            self.n_cases, self.n_filtered, self.n_evaluated
        );
        let ratio = self
            .ratio()
            .map_or("n/a".to_string(), |r| format!("{:.2}%", 100.0 * r));
        let _ = writeln!(s, "violation ratio: {ratio}");
        for v in self.verdicts.iter().filter(|v| v.verdict == Verdict::Violation) {
            let xs = match v.x3 {
                Some(x3) => format!("{}, {}, {}", fmt_number(v.x1), fmt_number(v.x2), fmt_number(x3)),
                None => format!("{}, {}", fmt_number(v.x1), fmt_number(v.x2)),
            };
            let _ = writeln!(
                s,
                "violation {}: ({xs}) fails {}{}",
                v.case_id,
                v.failed_conjunct.as_deref().unwrap_or("?"),
                if v.degenerate { " [degenerate]" } else { "" }
            );
        }
        s
    }

    /// Write `report.json` and `report.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), HarnessError> {
        let json_path = dir.join("report.json");
        let mut body = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        body.push('\n');
        write_atomic(&json_path, body.as_bytes()).map_err(|e| HarnessError::io(&json_path, e))?;
        let txt_path = dir.join("report.txt");
        write_atomic(&txt_path, self.to_text().as_bytes()).map_err(|e| HarnessError::io(&txt_path, e))
    }
}

/// Evaluate every generated case of a manifest against `mr`.
pub fn validate_cases(
    mr: &MetamorphicRelation,
    cases: &[GeneratedCase],
    predictions: &Predictions,
) -> Result<ViolationReport, HarnessError> {
    let evaluated: Vec<&GeneratedCase> = cases.iter().filter(|c| c.status.is_generated()).collect();
    let mut verdicts = evaluated
        .par_iter()
        .map(|c| {
            let paths: Vec<_> = std::iter::once(&c.source).chain(&c.followups).collect();
            let behavior = mr.behavior();
            let xs = paths
                .iter()
                .map(|p| {
                    let id = image_id(p);
                    predictions
                        .get(&id, behavior)
                        .ok_or_else(|| HarnessError::MissingPrediction(format!("{id} ({behavior})")))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            if xs.len() < 2 {
                return Err(HarnessError::ArityMismatch {
                    case_id: c.case_id.clone(),
                    expected: mr.arity(),
                    got: xs.len(),
                });
            }
            evaluate_case(mr, &c.case_id, xs[0], xs[1], xs.get(2).copied())
        })
        .collect::<Result<Vec<_>, _>>()?;
    verdicts.sort_by(|a, b| a.case_id.cmp(&b.case_id));
    let n_violations = verdicts.iter().filter(|v| v.verdict == Verdict::Violation).count();
    Ok(ViolationReport {
        rule_text: mr.rule_text.clone(),
        n_cases: cases.len(),
        n_filtered: cases.len() - evaluated.len(),
        n_evaluated: evaluated.len(),
        n_violations,
        verdicts,
    })
}
