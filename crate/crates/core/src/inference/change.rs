//! Reading the expected change off a then-clause.

use super::formula::{Behavior, Change, ChangePropositions, Modifier, Quantity, Unit};
use super::InferenceError;
use crate::ontology::{match_association, AssociationDomain, AssociationTarget, Ontology};
use crate::rule_lang::{root_index, Pos, PosLexicon, Token};

const STEERING_WORDS: &[&str] = &["steering", "angle", "deviate", "turn", "steer"];

fn change_of(tok: &Token, ontology: &Ontology) -> Option<Change> {
    let (target, _) = match_association(tok, ontology.lexicon(), AssociationDomain::Change)?;
    match target {
        AssociationTarget::Increase => Some(Change::Increase),
        AssociationTarget::Decrease => Some(Change::Decrease),
        AssociationTarget::Same => Some(Change::Same),
        _ => None,
    }
}

/// Modifier phrase and the index of its first token.
fn find_modifier(clause: &[Token]) -> Option<(Modifier, usize)> {
    clause.windows(2).enumerate().find_map(|(i, w)| {
        let pair = (w[0].text.to_lowercase(), w[1].text.to_lowercase());
        let m = match (pair.0.as_str(), pair.1.as_str()) {
            ("at", "least") => Modifier::AtLeast,
            ("more", "than") => Modifier::MoreThan,
            ("less", "than") | ("fewer", "than") => Modifier::LessThan,
            _ => return None,
        };
        Some((m, i))
    })
}

/// Extract change propositions from a tagged then-clause.
pub fn infer_expected_change(
    clause: &[Token],
    ontology: &Ontology,
) -> Result<ChangePropositions, InferenceError> {
    let text = crate::rule_lang::render(clause);
    let root = root_index(clause);

    let change = root
        .and_then(|r| change_of(&clause[r], ontology))
        .or_else(|| {
            // "keep the same": the change word need not be the root.
            let non_nouns = clause.iter().filter(|t| t.pos != Pos::Noun);
            let nouns = clause.iter().filter(|t| t.pos == Pos::Noun);
            non_nouns.chain(nouns).find_map(|t| change_of(t, ontology))
        })
        .ok_or_else(|| InferenceError::NoChangeMatched(text.clone()))?;

    let modifier = find_modifier(clause);
    let quantity = clause.iter().find(|t| t.is_quantity()).and_then(|t| {
        Some(Quantity {
            value: t.numeric_value()?,
            unit: if t.pos == Pos::Percent { Unit::Percent } else { Unit::Absolute },
        })
    });

    let lex = PosLexicon::builtin();
    let root_at = root.unwrap_or(clause.len());
    let negated = clause[..root_at].iter().any(|t| lex.is_negation(&t.text))
        || modifier.is_some_and(|(_, i)| i > 0 && lex.is_negation(&clause[i - 1].text));

    let in_modifier = |i: usize| modifier.is_some_and(|(_, m)| i == m || i == m + 1);
    let comparative_more = clause
        .iter()
        .enumerate()
        .any(|(i, t)| t.comparative && !in_modifier(i));

    let behavior = if clause.iter().any(|t| {
        let text = t.text.to_lowercase();
        STEERING_WORDS
            .iter()
            .any(|w| t.lemma == *w || text.split([' ', '-']).any(|part| part == *w))
    }) {
        Behavior::Steering
    } else {
        Behavior::Speed
    };

    let modifier = match (modifier, quantity) {
        (Some((m, _)), Some(_)) => m,
        (None, Some(_)) => Modifier::AtLeast,
        (None, None) => Modifier::None,
        (Some(_), None) => {
            return Err(InferenceError::InvalidChange(format!(
                "modifier without a quantity in {text:?}"
            )))
        }
    };

    let props = ChangePropositions {
        change,
        modifier,
        quantity,
        negated,
        comparative_more,
        behavior,
    };
    if change == Change::Same && (props.quantity.is_some() || props.modifier != Modifier::None) {
        return Err(InferenceError::InvalidChange(format!(
            "\"same\" takes no modifier or quantity in {text:?}"
        )));
    }
    Ok(props)
}
