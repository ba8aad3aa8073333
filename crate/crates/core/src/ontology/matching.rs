//! Mapping nouns and their modifiers onto ontology elements.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{Ontology, OntologyElement};
use crate::rule_lang::{DependencyPredicate, Pos, Relation, Token};

/// An ontology element bound to a noun of the rule, with the property
/// values its modifiers selected.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchedEntity {
    pub element: OntologyElement,
    pub bound_properties: BTreeMap<String, String>,
    pub source_token_index: usize,
    pub similarity: f64,
}

impl MatchedEntity {
    fn new(element: &OntologyElement, noun: &Token, similarity: f64) -> Self {
        Self {
            element: element.clone(),
            bound_properties: BTreeMap::new(),
            source_token_index: noun.index,
            similarity,
        }
    }

    fn bind_implied(mut self, value: &str) -> Self {
        if let Some(prop) = self.element.property_with_value(value) {
            self.bound_properties
                .insert(prop.to_string(), value.to_lowercase());
        }
        self
    }
}

fn forms(tok: &Token) -> Vec<String> {
    let mut out = vec![tok.lemma.to_lowercase()];
    let text = tok.text.to_lowercase();
    if !out.contains(&text) {
        out.push(text);
    }
    out
}

/// Bind a noun to an ontology element. Exact names and aliases win with
/// similarity 1; otherwise the element with the highest Wu-Palmer similarity
/// at or above `threshold` is chosen, ties broken by name.
pub fn match_element(noun: &Token, ontology: &Ontology, threshold: f64) -> Option<MatchedEntity> {
    if noun.pos != Pos::Noun || threshold > 1.0 {
        return None;
    }
    let forms = forms(noun);

    for form in &forms {
        if let Some(e) = ontology.elements().iter().find(|e| e.is_named(form)) {
            return Some(MatchedEntity::new(e, noun, 1.0).bind_implied(form));
        }
    }

    // "speed limit sign": alias hit on the head word, prefix as a value.
    let mut heads: Vec<(String, String)> = Vec::new();
    for form in &forms {
        if let Some((prefix, head)) = form.rsplit_once(' ') {
            heads.push((prefix.to_string(), head.to_string()));
        }
    }
    for (prefix, head) in &heads {
        if let Some(e) = ontology.elements().iter().find(|e| e.is_named(head)) {
            return Some(MatchedEntity::new(e, noun, 1.0).bind_implied(prefix));
        }
    }

    let taxonomy = ontology.taxonomy();
    let mut best: Option<(f64, &OntologyElement)> = None;
    let candidates = forms.iter().chain(heads.iter().map(|(_, h)| h));
    for form in candidates {
        if !taxonomy.contains(form) {
            continue;
        }
        for e in ontology.elements() {
            let Ok(sim) = taxonomy.wup_similarity(form, &e.name) else {
                continue;
            };
            let better = match best {
                None => true,
                Some((s, b)) => sim > s || (sim == s && e.name < b.name),
            };
            if better {
                best = Some((sim, e));
            }
        }
    }
    match best {
        Some((sim, e)) if sim >= threshold => Some(MatchedEntity::new(e, noun, sim)),
        _ => None,
    }
}

fn value_similarity(adj: &Token, value: &str, ontology: &Ontology) -> f64 {
    let taxonomy = ontology.taxonomy();
    forms(adj)
        .iter()
        .map(|f| {
            if f == value {
                1.0
            } else {
                taxonomy.wup_similarity(f, value).unwrap_or(0.0)
            }
        })
        .fold(0.0, f64::max)
}

/// Bind adjectival modifiers of the entity's noun to property values.
/// Modifiers that fit no property at or above `threshold` are reported as
/// warnings and ignored.
pub fn match_properties(
    mut entity: MatchedEntity,
    deps: &[DependencyPredicate],
    ontology: &Ontology,
    threshold: f64,
) -> (MatchedEntity, Vec<String>) {
    let mut warnings = Vec::new();
    for dep in deps {
        if dep.relation != Relation::Amod || dep.head.index != entity.source_token_index {
            continue;
        }
        let mut best: Option<(f64, &str, &str)> = None;
        for (prop, values) in &entity.element.properties {
            for v in values {
                let sim = value_similarity(&dep.dependent, v, ontology);
                if best.is_none_or(|(s, _, _)| sim > s) {
                    best = Some((sim, prop, v));
                }
            }
        }
        match best {
            Some((sim, prop, v)) if sim >= threshold && sim > 0.0 => {
                let (prop, v) = (prop.to_string(), v.to_string());
                entity.bound_properties.insert(prop, v);
            }
            _ => warnings.push(format!(
                "modifier {:?} matches no property of {}",
                dep.dependent.text, entity.element.name
            )),
        }
    }
    (entity, warnings)
}
