//! Splitting a rule into its if/then blocks.

use std::sync::OnceLock;

use regex::Regex;

use super::token::{tokenize, Token};
use super::RuleError;

/// One "if ... then ..." pair of a testing rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IftttBlock {
    pub if_text: String,
    pub then_text: String,
    pub if_clause: Vec<Token>,
    pub then_clause: Vec<Token>,
    /// 1-based position in the rule.
    pub order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Marker {
    If,
    Then,
}

fn marker_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\b(if|then)\b\s*:?").unwrap())
}

fn clean(segment: &str) -> String {
    segment
        .trim()
        .trim_matches(|c: char| c.is_whitespace() || matches!(c, ',' | '.' | ';' | ':' | '~' | '!' | '?'))
        .to_string()
}

/// "If a pedestrian appears, the speed should decrease." has no explicit
/// "then"; the first comma separates the clauses.
fn implicit_split(segment: &str) -> Option<(String, String)> {
    let (cond, action) = segment.split_once(',')?;
    let (cond, action) = (clean(cond), clean(action));
    (!cond.is_empty() && !action.is_empty()).then_some((cond, action))
}

/// Split rule text into blocks. Accepts the labeled form ("If: ... Then: ...")
/// and the sentence form ("If ..., then ..."), in any mix.
pub fn split_blocks(text: &str) -> Result<Vec<IftttBlock>, RuleError> {
    let markers: Vec<(Marker, usize, usize)> = marker_re()
        .captures_iter(text)
        .map(|c| {
            let m = c.get(0).unwrap();
            let kind = if c[1].eq_ignore_ascii_case("if") {
                Marker::If
            } else {
                Marker::Then
            };
            (kind, m.start(), m.end())
        })
        .collect();

    let Some(&(_, first_start, _)) = markers.first() else {
        return Err(RuleError::MalformedRule(
            "rule has no \"If\" clause".to_string(),
        ));
    };
    if !clean(&text[..first_start]).is_empty() {
        return Err(RuleError::MalformedRule(format!(
            "unexpected text before the first clause: {:?}",
            clean(&text[..first_start])
        )));
    }

    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut pending_if: Option<String> = None;
    for (k, &(kind, _, end)) in markers.iter().enumerate() {
        let seg_end = markers.get(k + 1).map_or(text.len(), |m| m.1);
        let segment = &text[end..seg_end];
        match kind {
            Marker::If => {
                if let Some(prev) = pending_if.take() {
                    pairs.push(implicit_split(&prev).ok_or_else(|| {
                        RuleError::MalformedRule(format!("\"If\" without \"Then\": {prev:?}"))
                    })?);
                }
                pending_if = Some(segment.to_string());
            }
            Marker::Then => {
                let cond = pending_if.take().ok_or_else(|| {
                    RuleError::MalformedRule(format!(
                        "\"Then\" without a preceding \"If\": {:?}",
                        clean(segment)
                    ))
                })?;
                pairs.push((clean(&cond), clean(segment)));
            }
        }
    }
    if let Some(prev) = pending_if {
        pairs.push(implicit_split(&prev).ok_or_else(|| {
            RuleError::MalformedRule(format!("\"If\" without \"Then\": {:?}", clean(&prev)))
        })?);
    }

    pairs
        .into_iter()
        .enumerate()
        .map(|(i, (cond, action))| {
            if cond.is_empty() || action.is_empty() {
                return Err(RuleError::MalformedRule(format!(
                    "block {} has an empty clause",
                    i + 1
                )));
            }
            Ok(IftttBlock {
                if_clause: tokenize(&cond),
                then_clause: tokenize(&action),
                if_text: cond,
                then_text: action,
                order: i + 1,
            })
        })
        .collect()
}
