//! Traffic-scene ontology, hypernym taxonomy and association lexicon.

mod element;
mod lexicon;
mod matching;
mod taxonomy;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

pub use element::{Category, OntologyElement};
pub use lexicon::{
    match_association, Association, AssociationDomain, AssociationLexicon, AssociationTarget,
};
pub use matching::{match_element, match_properties, MatchedEntity};
pub use taxonomy::{wup_similarity, Taxonomy, TaxonomyEdges};

use crate::rule_lang::PosLexicon;

const BUILTIN: &str = include_str!("builtin.yaml");

/// Taxonomy concept whose leaf descendants are adjectives rather than nouns.
const ATTRIBUTE_ROOT: &str = "attribute";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OntologyError {
    #[error("SchemaError at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("DuplicateElement: {0:?} is already defined")]
    DuplicateElement(String),
    #[error("UnknownConcept: {0:?} is not in the taxonomy")]
    UnknownConcept(String),
}

/// Element entry of a configuration document. Entries without a category
/// extend an existing element with extra aliases or properties.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<Category>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcategory: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub properties: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aliases: Vec<String>,
}

/// The `ontology:` section of a configuration document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OntologyDocument {
    #[serde(default)]
    pub elements: Vec<ElementEntry>,
    #[serde(default)]
    pub taxonomy: Vec<TaxonomyEdges>,
    #[serde(default)]
    pub lexicon: BTreeMap<String, Vec<Association>>,
}

#[derive(Debug, Default, Deserialize)]
struct Wrapper {
    #[serde(default)]
    ontology: Option<OntologyDocument>,
}

/// Extract the `ontology:` section from a full configuration document.
pub fn parse_document(text: &str) -> Result<OntologyDocument, OntologyError> {
    if text.trim().is_empty() {
        return Ok(OntologyDocument::default());
    }
    let value: serde_yaml::Value =
        serde_yaml::from_str(text).map_err(|e| OntologyError::Schema {
            path: "$".to_string(),
            message: e.to_string(),
        })?;
    let ontology = match value {
        serde_yaml::Value::Null => return Ok(OntologyDocument::default()),
        serde_yaml::Value::Mapping(ref m) => match m.get("ontology") {
            None | Some(serde_yaml::Value::Null) => return Ok(OntologyDocument::default()),
            Some(v) => v.clone(),
        },
        _ => {
            return Err(OntologyError::Schema {
                path: "$".to_string(),
                message: "configuration document must be a mapping".to_string(),
            })
        }
    };
    let wrapped: Wrapper = {
        let mut m = serde_yaml::Mapping::new();
        m.insert("ontology".into(), ontology);
        serde_path_to_error::deserialize(serde_yaml::Value::Mapping(m)).map_err(|e| {
            OntologyError::Schema {
                path: e.path().to_string(),
                message: e.inner().to_string(),
            }
        })?
    };
    Ok(wrapped.ontology.unwrap_or_default())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ontology {
    elements: Vec<OntologyElement>,
    taxonomy: Taxonomy,
    lexicon: AssociationLexicon,
}

impl Ontology {
    /// The built-in table, taxonomy and lexicon.
    pub fn builtin() -> Self {
        let doc = parse_document(BUILTIN).expect("built-in ontology parses");
        Self::from_document(&doc).expect("built-in ontology is valid")
    }

    /// Built-in defaults merged with the `ontology:` section of `document`.
    pub fn load(document: &str) -> Result<Self, OntologyError> {
        let user = parse_document(document)?;
        let mut base = parse_document(BUILTIN).expect("built-in ontology parses");
        merge(&mut base, user)?;
        Self::from_document(&base)
    }

    /// Build from a single self-contained document (no built-in defaults).
    pub fn from_document(doc: &OntologyDocument) -> Result<Self, OntologyError> {
        let taxonomy = Taxonomy::from_edges(&doc.taxonomy)?;
        let mut elements: Vec<OntologyElement> = Vec::new();
        for (i, entry) in doc.elements.iter().enumerate() {
            let path = format!("ontology.elements[{i}]");
            let name = entry.name.trim().to_lowercase();
            if name.is_empty() {
                return Err(schema(format!("{path}.name"), "element name is empty"));
            }
            if elements.iter().any(|e| e.name == name) {
                return Err(OntologyError::DuplicateElement(entry.name.clone()));
            }
            let category = entry
                .category
                .ok_or_else(|| schema(format!("{path}.category"), "missing category"))?;
            if !taxonomy.contains(&name) {
                return Err(schema(
                    format!("{path}.name"),
                    format!("{name:?} does not appear in the taxonomy"),
                ));
            }
            for (prop, values) in &entry.properties {
                for (k, v) in values.iter().enumerate() {
                    if *v != v.to_lowercase() || v.trim().is_empty() {
                        return Err(schema(
                            format!("{path}.properties.{prop}[{k}]"),
                            "property values must be non-empty lowercase strings",
                        ));
                    }
                }
            }
            elements.push(OntologyElement {
                name,
                category,
                subcategory: entry.subcategory.clone().unwrap_or_default(),
                properties: entry
                    .properties
                    .iter()
                    .map(|(k, v)| (k.to_lowercase(), v.clone()))
                    .collect(),
                aliases: entry.aliases.iter().map(|a| a.trim().to_lowercase()).collect(),
            });
        }

        let mut seen: HashSet<String> = HashSet::new();
        for (i, e) in elements.iter().enumerate() {
            for (k, word) in std::iter::once(&e.name).chain(&e.aliases).enumerate() {
                if !seen.insert(word.clone()) {
                    return Err(schema(
                        format!("ontology.elements[{i}].aliases[{}]", k.saturating_sub(1)),
                        format!("{word:?} names more than one element"),
                    ));
                }
            }
        }

        let mut lexicon = AssociationLexicon::default();
        for (lemma, rows) in &doc.lexicon {
            for (k, row) in rows.iter().enumerate() {
                if !(row.score > 0.0 && row.score <= 1.0) {
                    return Err(schema(
                        format!("ontology.lexicon.{lemma}[{k}].score"),
                        "score must lie in (0, 1]",
                    ));
                }
                lexicon.insert(lemma, *row);
            }
        }

        Ok(Self {
            elements,
            taxonomy,
            lexicon,
        })
    }

    /// Self-contained document equivalent to this ontology.
    pub fn to_document(&self) -> OntologyDocument {
        OntologyDocument {
            elements: self
                .elements
                .iter()
                .map(|e| ElementEntry {
                    name: e.name.clone(),
                    category: Some(e.category),
                    subcategory: Some(e.subcategory.clone()),
                    properties: e.properties.clone(),
                    aliases: e.aliases.clone(),
                })
                .collect(),
            taxonomy: self.taxonomy.to_edges(),
            lexicon: self.lexicon.entries().clone(),
        }
    }

    /// YAML text of [`Self::to_document`] under an `ontology:` key.
    pub fn to_yaml(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            ontology: &'a OntologyDocument,
        }
        serde_yaml::to_string(&Out {
            ontology: &self.to_document(),
        })
        .expect("ontology serializes")
    }

    pub fn elements(&self) -> &[OntologyElement] {
        &self.elements
    }

    pub fn element(&self, name: &str) -> Option<&OntologyElement> {
        let n = name.to_lowercase();
        self.elements.iter().find(|e| e.name == n)
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn lexicon(&self) -> &AssociationLexicon {
        &self.lexicon
    }

    /// Tagger lexicon primed with this ontology's nouns, verbs and adjectives.
    pub fn pos_lexicon(&self) -> PosLexicon {
        let mut lex = PosLexicon::builtin();
        let attribute_leaves: HashSet<&str> = self
            .taxonomy
            .concepts()
            .filter(|c| self.taxonomy.is_leaf(c) && self.taxonomy.is_descendant(c, ATTRIBUTE_ROOT))
            .collect();
        lex.add_adjectives(attribute_leaves.iter().copied());
        lex.add_nouns(
            self.taxonomy
                .concepts()
                .filter(|c| !attribute_leaves.contains(c)),
        );
        for e in &self.elements {
            lex.add_nouns(std::iter::once(&e.name).chain(&e.aliases));
        }
        let verbs: Vec<&str> = self
            .lexicon
            .lemmas()
            .filter(|l| !attribute_leaves.contains(l) && !lex.is_adjective(l))
            .collect();
        lex.add_verbs(verbs);
        lex
    }

    /// Human-readable table of elements.
    pub fn render_table(&self) -> String {
        let mut out = String::from("category\tsubcategory\telement\tproperties\taliases\n");
        for e in &self.elements {
            let props: Vec<String> = e
                .properties
                .iter()
                .map(|(k, v)| format!("{k}: [{}]", v.join(", ")))
                .collect();
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                e.category,
                e.subcategory,
                e.name,
                if props.is_empty() { "-".to_string() } else { props.join("; ") },
                if e.aliases.is_empty() { "-".to_string() } else { e.aliases.join(", ") },
            ));
        }
        out
    }
}

impl Default for Ontology {
    fn default() -> Self {
        Self::builtin()
    }
}

fn schema(path: String, message: impl Into<String>) -> OntologyError {
    OntologyError::Schema {
        path,
        message: message.into(),
    }
}

fn merge(base: &mut OntologyDocument, user: OntologyDocument) -> Result<(), OntologyError> {
    for (i, entry) in user.elements.into_iter().enumerate() {
        let name = entry.name.trim().to_lowercase();
        let existing = base
            .elements
            .iter_mut()
            .find(|e| e.name.trim().to_lowercase() == name);
        match (existing, entry.category.is_some()) {
            (Some(_), true) => return Err(OntologyError::DuplicateElement(entry.name)),
            (Some(e), false) => {
                if entry.subcategory.is_some() {
                    return Err(schema(
                        format!("ontology.elements[{i}].subcategory"),
                        "cannot change the subcategory of an existing element",
                    ));
                }
                for alias in entry.aliases {
                    if !e.aliases.contains(&alias) {
                        e.aliases.push(alias);
                    }
                }
                for (prop, values) in entry.properties {
                    let slot = e.properties.entry(prop).or_default();
                    for v in values {
                        if !slot.contains(&v) {
                            slot.push(v);
                        }
                    }
                }
            }
            (None, true) => base.elements.push(entry),
            (None, false) => {
                return Err(schema(
                    format!("ontology.elements[{i}].category"),
                    format!("{:?} is not a built-in element and needs a category", entry.name),
                ))
            }
        }
    }
    base.taxonomy.extend(user.taxonomy);
    for (lemma, rows) in user.lexicon {
        base.lexicon.entry(lemma).or_default().extend(rows);
    }
    Ok(())
}

/// Built-in ontology merged with the `ontology:` section of `document`.
pub fn load_ontology(document: &str) -> Result<Ontology, OntologyError> {
    Ontology::load(document)
}
