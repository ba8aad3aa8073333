//! Assembling metamorphic relations from parsed blocks.

use serde_json::{json, Value};

use super::change::infer_expected_change;
use super::formula::{build_formula, Behavior, ChangePropositions, ExpectedChangeFormula, Pair};
use super::transform::{infer_transformation, ClauseContext, TransformationProposition};
use super::InferenceError;
use crate::config::Thresholds;
use crate::ontology::{MatchedEntity, Ontology};
use crate::rule_lang::{
    extract_dependencies, pos_tag, split_blocks, DependencyPredicate, IftttBlock, RuleError,
};

/// One block with tagged clauses and their dependencies.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedBlock {
    pub block: IftttBlock,
    pub if_deps: Vec<DependencyPredicate>,
    pub then_deps: Vec<DependencyPredicate>,
}

/// Split, tag and extract dependencies for every block of a rule.
pub fn analyze_rule(text: &str, ontology: &Ontology) -> Result<Vec<ParsedBlock>, RuleError> {
    let lexicon = ontology.pos_lexicon();
    split_blocks(text)?
        .into_iter()
        .map(|mut block| {
            block.if_clause = pos_tag(&block.if_clause, &lexicon);
            block.then_clause = pos_tag(&block.then_clause, &lexicon);
            Ok(ParsedBlock {
                if_deps: extract_dependencies(&block.if_clause)?,
                then_deps: extract_dependencies(&block.then_clause)?,
                block,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MrBlock {
    pub proposition: TransformationProposition,
    pub change: ChangePropositions,
    pub formula: ExpectedChangeFormula,
}

/// A single relation over (x1, x2) or a chained one over (x1, x2, x3).
#[derive(Debug, Clone, PartialEq)]
pub struct MetamorphicRelation {
    pub rule_text: String,
    pub blocks: Vec<MrBlock>,
}

impl MetamorphicRelation {
    pub fn is_chained(&self) -> bool {
        self.blocks.len() > 1
    }

    /// Number of predictions a case needs.
    pub fn arity(&self) -> usize {
        self.blocks.len() + 1
    }

    /// Behavior shared by all blocks.
    pub fn behavior(&self) -> Behavior {
        self.blocks
            .first()
            .map_or(Behavior::Speed, |b| b.formula.behavior)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "blocks": self.blocks.iter().map(|b| json!({
                "proposition": b.proposition.to_json(),
                "formula": b.formula.to_json(),
            })).collect::<Vec<_>>(),
        })
    }

    /// Canonical single-line JSON.
    pub fn to_canonical_json(&self) -> String {
        self.to_json().to_string()
    }
}

/// Infer the relation for already analyzed blocks. Returns warnings about
/// modifiers that matched no ontology property.
pub fn build_mr(
    parsed: &[ParsedBlock],
    rule_text: &str,
    ontology: &Ontology,
    thresholds: &Thresholds,
) -> Result<(MetamorphicRelation, Vec<String>), InferenceError> {
    if parsed.is_empty() || parsed.len() > 2 {
        return Err(InferenceError::TooManyBlocks(parsed.len()));
    }
    let mut warnings = Vec::new();
    let mut blocks: Vec<MrBlock> = Vec::new();
    let mut prior: Vec<MatchedEntity> = Vec::new();

    for p in parsed {
        let ctx = ClauseContext {
            clause: &p.block.if_clause,
            deps: &p.if_deps,
            ontology,
            threshold: thresholds.wup_threshold,
            prior_entities: &prior,
        };
        let proposition = match (blocks.first(), infer_transformation(&ctx, &mut warnings)) {
            (_, Ok(mut own)) => {
                if !blocks.is_empty() {
                    own.comparative = ctx.comparative();
                }
                own
            }
            // "he gets closer": the first block's transformation, pushed further.
            (
                Some(first),
                Err(InferenceError::NoTransformationMatched(_) | InferenceError::MissingReference(_)),
            ) => {
                ctx.subject()?;
                TransformationProposition {
                    comparative: ctx.comparative(),
                    ..first.proposition.clone()
                }
            }
            (_, Err(e)) => return Err(e),
        };
        prior.push(proposition.target.clone());

        let change = infer_expected_change(&p.block.then_clause, ontology)?;
        let mut formula = build_formula(&change, thresholds);
        if blocks.first().is_some_and(|b| b.formula.behavior != formula.behavior) {
            return Err(InferenceError::InvalidChange(
                "chained blocks must constrain the same behavior".into(),
            ));
        }
        if !blocks.is_empty() {
            formula.pair = Pair::X2X3;
        }
        blocks.push(MrBlock {
            proposition,
            change,
            formula,
        });
    }

    Ok((
        MetamorphicRelation {
            rule_text: rule_text.trim().to_string(),
            blocks,
        },
        warnings,
    ))
}

/// Result of parsing a rule end to end.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRule {
    pub blocks: Vec<ParsedBlock>,
    pub mr: MetamorphicRelation,
    pub warnings: Vec<String>,
}

pub fn parse_rule(
    text: &str,
    ontology: &Ontology,
    thresholds: &Thresholds,
) -> Result<ParsedRule, InferenceError> {
    let blocks = analyze_rule(text, ontology)?;
    let (mr, warnings) = build_mr(&blocks, text, ontology, thresholds)?;
    Ok(ParsedRule {
        blocks,
        mr,
        warnings,
    })
}
