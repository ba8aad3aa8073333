//! Reading the scene transformation off an if-clause.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::InferenceError;
use crate::ontology::{
    match_association, match_element, match_properties, AssociationDomain, AssociationTarget,
    Category, MatchedEntity, Ontology,
};
use crate::rule_lang::{DependencyPredicate, Pos, Relation, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformationKind {
    Add,
    Remove,
    Replace,
}

impl TransformationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TransformationKind::Add => "add",
            TransformationKind::Remove => "remove",
            TransformationKind::Replace => "replace",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_lowercase().as_str() {
            "add" => Some(Self::Add),
            "remove" => Some(Self::Remove),
            "replace" => Some(Self::Replace),
            _ => None,
        }
    }
}

impl fmt::Display for TransformationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Position {
    On,
    Front,
    Behind,
}

impl Position {
    pub fn as_str(self) -> &'static str {
        match self {
            Position::On => "on",
            Position::Front => "front",
            Position::Behind => "behind",
        }
    }

    fn from_relation(r: &Relation) -> Option<Self> {
        match r {
            Relation::Prep(p) => match p.as_str() {
                "ON" | "ONTO" => Some(Position::On),
                "FRONT" => Some(Position::Front),
                "BEHIND" => Some(Position::Behind),
                _ => None,
            },
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReplaceKind {
    Weather,
    Time,
    Object,
}

impl ReplaceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReplaceKind::Weather => "weather",
            ReplaceKind::Time => "time",
            ReplaceKind::Object => "object",
        }
    }
}

/// The if-side of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformationProposition {
    pub kind: TransformationKind,
    pub target: MatchedEntity,
    pub reference: Option<MatchedEntity>,
    pub position: Option<Position>,
    pub replace_kind: Option<ReplaceKind>,
    pub comparative: Option<String>,
}

fn entity_json(e: &MatchedEntity) -> Value {
    json!({
        "element": e.element.name,
        "properties": e.bound_properties,
    })
}

impl TransformationProposition {
    /// Canonical JSON object with a fixed key order.
    pub fn to_json(&self) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("kind".into(), json!(self.kind.as_str()));
        m.insert("target".into(), entity_json(&self.target));
        m.insert(
            "reference".into(),
            self.reference.as_ref().map_or(Value::Null, entity_json),
        );
        m.insert(
            "position".into(),
            self.position.map_or(Value::Null, |p| json!(p.as_str())),
        );
        if let Some(k) = self.replace_kind {
            m.insert("replace_kind".into(), json!(k.as_str()));
        }
        m.insert(
            "comparative".into(),
            self.comparative.as_ref().map_or(Value::Null, |c| json!(c)),
        );
        Value::Object(m)
    }
}

impl fmt::Display for TransformationProposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ent = |e: &MatchedEntity| {
            if e.bound_properties.is_empty() {
                e.element.name.clone()
            } else {
                let props: Vec<String> = e
                    .bound_properties
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                format!("{}{{{}}}", e.element.name, props.join(", "))
            }
        };
        write!(f, "{}({}", self.kind, ent(&self.target))?;
        if let Some(r) = &self.reference {
            write!(f, ", {}", ent(r))?;
        }
        if let Some(p) = self.position {
            write!(f, ", {}", p.as_str())?;
        }
        if let Some(k) = self.replace_kind {
            write!(f, ", {}", k.as_str())?;
        }
        if let Some(c) = &self.comparative {
            write!(f, ", {c}")?;
        }
        f.write_str(")")
    }
}

/// Most recent prior entity compatible with the pronoun: he/she refer to
/// people, it/they to anything.
pub fn resolve_pronoun(
    pron: &Token,
    prior_entities: &[MatchedEntity],
) -> Result<MatchedEntity, InferenceError> {
    let word = pron.text.to_lowercase();
    let personal = matches!(word.as_str(), "he" | "she" | "him" | "her");
    prior_entities
        .iter()
        .rev()
        .find(|e| !personal || matches!(e.element.name.as_str(), "pedestrian" | "bicyclist"))
        .map(|e| MatchedEntity {
            source_token_index: pron.index,
            ..e.clone()
        })
        .ok_or(InferenceError::UnresolvedPronoun(pron.text.clone()))
}

/// Everything an if-clause contributes to inference.
pub struct ClauseContext<'a> {
    pub clause: &'a [Token],
    pub deps: &'a [DependencyPredicate],
    pub ontology: &'a Ontology,
    pub threshold: f64,
    pub prior_entities: &'a [MatchedEntity],
}

impl ClauseContext<'_> {
    fn entity(&self, noun: &Token, warnings: &mut Vec<String>) -> Result<MatchedEntity, InferenceError> {
        if noun.pos == Pos::Pron {
            return resolve_pronoun(noun, self.prior_entities);
        }
        let e = match_element(noun, self.ontology, self.threshold)
            .ok_or_else(|| InferenceError::NoOntologyMatch(noun.text.clone()))?;
        let (e, w) = match_properties(e, self.deps, self.ontology, self.threshold);
        warnings.extend(w);
        Ok(e)
    }

    /// Root verb and the noun the transformation acts on.
    fn verb_and_target(&self) -> Result<(&Token, &Token), InferenceError> {
        let find = |rel: Relation| self.deps.iter().find(|d| d.relation == rel);
        let nsubj = find(Relation::Nsubj);
        let dobj = find(Relation::Dobj);
        let agentive = nsubj.is_some_and(|d| {
            d.dependent.pos == Pos::Pron
                && matches!(d.dependent.text.to_lowercase().as_str(), "we" | "you" | "i")
        });
        match (nsubj, dobj) {
            (Some(s), _) if !agentive => Ok((&s.head, &s.dependent)),
            (_, Some(o)) => Ok((&o.head, &o.dependent)),
            _ => Err(InferenceError::NoOntologyMatch(format!(
                "no subject in {:?}",
                crate::rule_lang::render(self.clause)
            ))),
        }
    }

    /// Subject entity only, for blocks that inherit their transformation.
    pub fn subject(&self) -> Result<MatchedEntity, InferenceError> {
        let (_, noun) = self.verb_and_target()?;
        self.entity(noun, &mut Vec::new())
    }

    pub fn comparative(&self) -> Option<String> {
        self.clause
            .iter()
            .find(|t| t.comparative)
            .map(|t| t.text.to_lowercase())
    }
}

fn complement_environment(target: &mut MatchedEntity, reference: &MatchedEntity) {
    if !target.bound_properties.is_empty() {
        return;
    }
    for (prop, value) in &reference.bound_properties {
        if let Some(values) = target.element.properties.get(prop) {
            if values.len() == 2 {
                if let Some(other) = values.iter().find(|v| *v != value) {
                    target.bound_properties.insert(prop.clone(), other.clone());
                }
            }
        }
    }
}

/// Apply the transformation inference table to one if-clause.
pub fn infer_transformation(
    ctx: &ClauseContext<'_>,
    warnings: &mut Vec<String>,
) -> Result<TransformationProposition, InferenceError> {
    let (verb, noun) = ctx.verb_and_target()?;
    let (target_kind, _) =
        match_association(verb, ctx.ontology.lexicon(), AssociationDomain::Transformation)
            .ok_or_else(|| InferenceError::NoTransformationMatched(verb.text.clone()))?;
    let mut target = ctx.entity(noun, warnings)?;
    let preps = || {
        ctx.deps
            .iter()
            .filter(move |d| matches!(d.relation, Relation::Prep(_)) && d.head.index == verb.index)
    };

    let (kind, reference, position, replace_kind) = match target_kind {
        AssociationTarget::Add => {
            let (dep, position) = preps()
                .find_map(|d| Position::from_relation(&d.relation).map(|p| (d, p)))
                .ok_or_else(|| InferenceError::MissingReference(verb.text.clone()))?;
            let reference = ctx.entity(&dep.dependent, warnings)?;
            (TransformationKind::Add, Some(reference), Some(position), None)
        }
        AssociationTarget::Remove => (TransformationKind::Remove, None, None, None),
        AssociationTarget::Replace => {
            let dep = preps()
                .find(|d| matches!(d.relation.name(), "WITH" | "INTO" | "TO" | "BY" | "AS"))
                .ok_or_else(|| InferenceError::MissingReference(verb.text.clone()))?;
            let reference = ctx.entity(&dep.dependent, warnings)?;
            let env = |e: &MatchedEntity| e.element.category == Category::Environment;
            let kind = match (env(&target), env(&reference)) {
                (true, true) if target.element.name != reference.element.name => {
                    return Err(InferenceError::InvalidReplace(format!(
                        "{} cannot become {}",
                        target.element.name, reference.element.name
                    )))
                }
                (true, true) if target.element.name == "time" => ReplaceKind::Time,
                (true, true) => ReplaceKind::Weather,
                (false, false) => ReplaceKind::Object,
                _ => {
                    return Err(InferenceError::InvalidReplace(format!(
                        "{} and {} are of different kinds",
                        target.element.name, reference.element.name
                    )))
                }
            };
            if kind != ReplaceKind::Object {
                complement_environment(&mut target, &reference);
            }
            (TransformationKind::Replace, Some(reference), None, Some(kind))
        }
        other => {
            return Err(InferenceError::NoTransformationMatched(format!(
                "{} (associated with {other})",
                verb.text
            )))
        }
    };
    Ok(TransformationProposition {
        kind,
        target,
        reference,
        position,
        replace_kind,
        comparative: None,
    })
}
