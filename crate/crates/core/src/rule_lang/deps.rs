//! Pattern-based dependency extraction over tagged clauses.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::token::{Pos, Token};
use super::RuleError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Relation {
    Nsubj,
    Dobj,
    Nmod,
    Amod,
    Advmod,
    Npadvmod,
    Det,
    /// Indirect verb-noun link named after the preposition (ON, WITH, FRONT, ...).
    Prep(String),
}

impl Relation {
    pub fn from_preposition(prep: &str) -> Self {
        let p = prep.to_lowercase();
        let name = match p.as_str() {
            "in front of" => "FRONT".to_string(),
            other => other.replace(' ', "_").to_uppercase(),
        };
        Relation::Prep(name)
    }

    pub fn name(&self) -> &str {
        match self {
            Relation::Nsubj => "NSUBJ",
            Relation::Dobj => "DOBJ",
            Relation::Nmod => "NMOD",
            Relation::Amod => "AMOD",
            Relation::Advmod => "ADVMOD",
            Relation::Npadvmod => "NPADVMOD",
            Relation::Det => "DET",
            Relation::Prep(p) => p,
        }
    }

    pub fn is_prepositional(&self) -> bool {
        matches!(self, Relation::Prep(_))
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A grammatical relation between a dependent token and its head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyPredicate {
    pub relation: Relation,
    pub dependent: Token,
    pub head: Token,
}

impl DependencyPredicate {
    fn new(relation: Relation, dependent: &Token, head: &Token) -> Self {
        Self {
            relation,
            dependent: dependent.clone(),
            head: head.clone(),
        }
    }
}

impl fmt::Display for DependencyPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})", self.relation, self.dependent.text, self.head.text)
    }
}

impl Serialize for DependencyPredicate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("DependencyPredicate", 3)?;
        s.serialize_field("relation", self.relation.name())?;
        s.serialize_field("dependent", &self.dependent.text)?;
        s.serialize_field("head", &self.head.text)?;
        s.end()
    }
}

/// Index of the clause root: the first non-auxiliary verb.
pub fn root_index(clause: &[Token]) -> Option<usize> {
    clause.iter().position(|t| t.pos == Pos::Verb)
}

/// Noun that closes the noun phrase starting at `start`, skipping determiners,
/// adjectives and numerals.
fn phrase_noun(clause: &[Token], start: usize) -> Option<usize> {
    for (j, t) in clause.iter().enumerate().skip(start) {
        match t.pos {
            Pos::Noun => return Some(j),
            Pos::Det | Pos::Adj | Pos::Num => continue,
            _ => return None,
        }
    }
    None
}

/// Extract dependency predicates from a tagged clause.
///
/// The root is the first VERB. The subject is the nearest noun or pronoun
/// before the root that is not the object of a preposition. Each preposition
/// links the noun closing its phrase to the root (or, inside the subject
/// phrase, to the preceding noun as NMOD). Nouns left unattached hang on the
/// root as NMOD so that every head chain ends at the root.
pub fn extract_dependencies(clause: &[Token]) -> Result<Vec<DependencyPredicate>, RuleError> {
    let root = root_index(clause).ok_or_else(|| {
        RuleError::NoRootVerb(super::token::render(clause))
    })?;
    let root_tok = &clause[root];

    // Object noun of every preposition.
    let mut prep_object: Vec<Option<usize>> = vec![None; clause.len()];
    let mut is_prep_object = vec![false; clause.len()];
    for (i, t) in clause.iter().enumerate() {
        if t.pos == Pos::Adp {
            if let Some(j) = phrase_noun(clause, i + 1) {
                prep_object[i] = Some(j);
                is_prep_object[j] = true;
            }
        }
    }

    let mut preds = Vec::new();
    let mut attached = vec![false; clause.len()];

    let subject = (0..root)
        .rev()
        .find(|&k| clause[k].is_nominal() && !is_prep_object[k]);
    if let Some(k) = subject {
        preds.push(DependencyPredicate::new(Relation::Nsubj, &clause[k], root_tok));
        attached[k] = true;
    }

    for (j, t) in clause.iter().enumerate().skip(root + 1) {
        if t.pos == Pos::Adp {
            break;
        }
        if t.pos == Pos::Noun {
            preds.push(DependencyPredicate::new(Relation::Dobj, t, root_tok));
            attached[j] = true;
            break;
        }
    }

    for (i, t) in clause.iter().enumerate() {
        let Some(j) = prep_object[i] else { continue };
        let inside_subject = if i < root {
            (0..i).rev().find(|&k| clause[k].pos == Pos::Noun)
        } else {
            None
        };
        match inside_subject {
            Some(h) => {
                preds.push(DependencyPredicate::new(Relation::Nmod, &clause[j], &clause[h]));
            }
            None => {
                preds.push(DependencyPredicate::new(
                    Relation::from_preposition(&t.text),
                    &clause[j],
                    root_tok,
                ));
            }
        }
        attached[j] = true;
    }

    for (j, t) in clause.iter().enumerate() {
        if t.is_nominal() && !attached[j] {
            preds.push(DependencyPredicate::new(Relation::Nmod, t, root_tok));
            attached[j] = true;
        }
    }

    for (i, t) in clause.iter().enumerate() {
        match t.pos {
            Pos::Adj => {
                if let Some(j) = phrase_noun(clause, i + 1) {
                    preds.push(DependencyPredicate::new(Relation::Amod, t, &clause[j]));
                }
            }
            Pos::Adv => preds.push(DependencyPredicate::new(Relation::Advmod, t, root_tok)),
            Pos::Num | Pos::Percent => {
                let modifies_noun = t.pos == Pos::Num
                    && clause.get(i + 1).is_some_and(|n| n.pos == Pos::Noun);
                if !modifies_noun {
                    preds.push(DependencyPredicate::new(Relation::Npadvmod, t, root_tok));
                }
            }
            Pos::Det => {
                if let Some(j) = phrase_noun(clause, i + 1) {
                    preds.push(DependencyPredicate::new(Relation::Det, t, &clause[j]));
                }
            }
            _ => {}
        }
    }

    Ok(preds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule_lang::tagger::{pos_tag, PosLexicon};
    use crate::rule_lang::token::tokenize;

    fn lexicon() -> PosLexicon {
        let mut lex = PosLexicon::builtin();
        lex.add_nouns([
            "pedestrian", "roadside", "building", "tree", "ego-vehicle", "speed", "road",
            "steering angle",
        ]);
        lex.add_verbs(["appear", "slow", "replace", "remove", "keep", "decrease", "speed"]);
        lex
    }

    fn deps(text: &str) -> Vec<String> {
        let toks = pos_tag(&tokenize(text), &lexicon());
        extract_dependencies(&toks)
            .unwrap()
            .iter()
            .map(|p| p.to_string())
            .collect()
    }

    #[test]
    fn figure_sentence() {
        let d = deps("a pedestrian appears on the roadside");
        assert_eq!(
            d,
            [
                "NSUBJ(pedestrian, appears)",
                "ON(roadside, appears)",
                "DET(a, pedestrian)",
                "DET(the, roadside)"
            ]
        );
    }

    #[test]
    fn passive_replace() {
        let d = deps("the buildings are replaced with trees");
        assert_eq!(
            d,
            ["NSUBJ(buildings, replaced)", "WITH(trees, replaced)", "DET(the, buildings)"]
        );
    }

    #[test]
    fn quantity_modifiers_hang_on_root() {
        let d = deps("the ego-vehicle should slow down at least 30%");
        assert_eq!(
            d,
            [
                "NSUBJ(ego-vehicle, slow)",
                "DET(the, ego-vehicle)",
                "ADVMOD(least, slow)",
                "NPADVMOD(30%, slow)"
            ]
        );
    }

    #[test]
    fn preposition_inside_subject_is_nmod() {
        let d = deps("the steering angle of ego-vehicle should keep the same");
        assert!(d.contains(&"NSUBJ(steering angle, keep)".to_string()));
        assert!(d.contains(&"NMOD(ego-vehicle, steering angle)".to_string()));
    }

    #[test]
    fn front_collapses() {
        let toks = pos_tag(&tokenize("a pedestrian appears in front of the building"), &lexicon());
        let d = extract_dependencies(&toks).unwrap();
        assert!(d.iter().any(|p| p.relation == Relation::Prep("FRONT".into())
            && p.dependent.text == "building"));
    }

    #[test]
    fn no_verb() {
        let toks = pos_tag(&tokenize("purple happiness"), &lexicon());
        assert!(matches!(extract_dependencies(&toks), Err(RuleError::NoRootVerb(_))));
    }

    #[test]
    fn json_line_shape() {
        let toks = pos_tag(&tokenize("a pedestrian appears"), &lexicon());
        let d = extract_dependencies(&toks).unwrap();
        assert_eq!(
            serde_json::to_string(&d[0]).unwrap(),
            r#"{"relation":"NSUBJ","dependent":"pedestrian","head":"appears"}"#
        );
    }
}
