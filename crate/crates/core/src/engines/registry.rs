//! Engine declarations and selection.

use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::inference::{TransformationKind, TransformationProposition};
use crate::ontology::{Category, Ontology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    BuiltinManipulation,
    BuiltinLabelEdit,
    External,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Support {
    pub transformation: TransformationKind,
    pub elements: Vec<String>,
}

fn default_timeout() -> u64 {
    120
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineSpec {
    pub name: String,
    pub kind: EngineKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry: Option<String>,
    pub support: Vec<Support>,
    #[serde(default = "default_timeout")]
    pub timeout_s: u64,
}

impl EngineSpec {
    pub fn supports(&self, kind: TransformationKind, element: &str) -> bool {
        let element = element.to_lowercase();
        self.support.iter().any(|s| {
            s.transformation == kind && s.elements.iter().any(|e| e.to_lowercase() == element)
        })
    }
}

/// Engines in declaration order; earlier entries take priority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineRegistry {
    specs: Vec<EngineSpec>,
}

impl EngineRegistry {
    pub fn new(specs: Vec<EngineSpec>) -> Result<Self, EngineError> {
        for (i, s) in specs.iter().enumerate() {
            if specs[..i].iter().any(|o| o.name == s.name) {
                return Err(EngineError::InvalidRegistry(format!("duplicate engine name {:?}", s.name)));
            }
            if s.support.is_empty() {
                return Err(EngineError::InvalidRegistry(format!("engine {:?} supports nothing", s.name)));
            }
            if s.timeout_s == 0 {
                return Err(EngineError::InvalidRegistry(format!("engine {:?} has a zero timeout", s.name)));
            }
            let has_entry = s.entry.as_deref().is_some_and(|e| !e.trim().is_empty());
            if s.kind == EngineKind::External && !has_entry {
                return Err(EngineError::InvalidRegistry(format!("external engine {:?} has no entry", s.name)));
            }
        }
        Ok(Self { specs })
    }

    /// The two built-in engines: mask manipulation for add, label editing
    /// for remove and replace of non-environment elements.
    pub fn defaults(ontology: &Ontology) -> Self {
        let addable = ["pedestrian", "traffic sign", "vehicle", "bicyclist", "tree"]
            .into_iter()
            .filter(|e| ontology.element(e).is_some())
            .map(String::from)
            .collect();
        let editable: Vec<String> = ontology
            .elements()
            .iter()
            .filter(|e| e.category != Category::Environment)
            .map(|e| e.name.clone())
            .collect();
        Self::new(vec![
            EngineSpec {
                name: "builtin_manipulation".into(),
                kind: EngineKind::BuiltinManipulation,
                entry: None,
                support: vec![Support {
                    transformation: TransformationKind::Add,
                    elements: addable,
                }],
                timeout_s: default_timeout(),
            },
            EngineSpec {
                name: "builtin_label_edit".into(),
                kind: EngineKind::BuiltinLabelEdit,
                entry: None,
                support: vec![
                    Support {
                        transformation: TransformationKind::Remove,
                        elements: editable.clone(),
                    },
                    Support {
                        transformation: TransformationKind::Replace,
                        elements: editable,
                    },
                ],
                timeout_s: default_timeout(),
            },
        ])
        .expect("default registry is valid")
    }

    pub fn specs(&self) -> &[EngineSpec] {
        &self.specs
    }
}

/// First engine, in declaration order, that supports the proposition's
/// transformation on its target element.
pub fn select_engine<'a>(
    registry: &'a EngineRegistry,
    proposition: &TransformationProposition,
) -> Result<&'a EngineSpec, EngineError> {
    let element = &proposition.target.element.name;
    registry
        .specs
        .iter()
        .find(|s| s.supports(proposition.kind, element))
        .ok_or_else(|| EngineError::NoEngineSupports {
            kind: proposition.kind.as_str().to_string(),
            element: element.clone(),
        })
}
