use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Category {
    RoadNetwork,
    Object,
    Environment,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Category::RoadNetwork => "RoadNetwork",
            Category::Object => "Object",
            Category::Environment => "Environment",
        };
        f.write_str(s)
    }
}

/// A level-2 element of the traffic-scene ontology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OntologyElement {
    pub name: String,
    pub category: Category,
    pub subcategory: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub properties: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aliases: Vec<String>,
}

impl OntologyElement {
    /// Whether `word` names this element directly or through an alias.
    pub fn is_named(&self, word: &str) -> bool {
        let w = word.trim().to_lowercase();
        self.name == w || self.aliases.iter().any(|a| a.to_lowercase() == w)
    }

    /// Property whose allowed values contain `value`, if any.
    pub fn property_with_value(&self, value: &str) -> Option<&str> {
        let v = value.to_lowercase();
        self.properties
            .iter()
            .find(|(_, vals)| vals.contains(&v))
            .map(|(k, _)| k.as_str())
    }

    /// Leaf subcategory label ("RoadPart/Line" → "Line").
    pub fn leaf_subcategory(&self) -> &str {
        self.subcategory.rsplit('/').next().unwrap_or(&self.subcategory)
    }
}
