//! Verb association lexicon: lemma → transformation or expected change.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rule_lang::Token;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssociationTarget {
    Add,
    Remove,
    Replace,
    Increase,
    Decrease,
    Same,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssociationDomain {
    Transformation,
    Change,
}

impl AssociationTarget {
    pub fn domain(self) -> AssociationDomain {
        match self {
            Self::Add | Self::Remove | Self::Replace => AssociationDomain::Transformation,
            Self::Increase | Self::Decrease | Self::Same => AssociationDomain::Change,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Add => "add",
            Self::Remove => "remove",
            Self::Replace => "replace",
            Self::Increase => "increase",
            Self::Decrease => "decrease",
            Self::Same => "same",
        }
    }
}

impl fmt::Display for AssociationTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Association {
    pub target: AssociationTarget,
    pub score: f64,
}

/// Curated lemma associations. Rows per lemma are kept sorted by descending
/// score (ties by target name).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AssociationLexicon {
    entries: BTreeMap<String, Vec<Association>>,
}

impl AssociationLexicon {
    pub fn insert(&mut self, lemma: &str, row: Association) {
        let rows = self.entries.entry(lemma.trim().to_lowercase()).or_default();
        rows.retain(|r| r.target != row.target);
        rows.push(row);
        rows.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.target.cmp(&b.target))
        });
    }

    pub fn get(&self, lemma: &str) -> &[Association] {
        self.entries
            .get(&lemma.to_lowercase())
            .map(Vec::as_slice)
            .unwrap_or_default()
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self) -> &BTreeMap<String, Vec<Association>> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Best association for a lemma within one domain.
    pub fn best(&self, lemma: &str, domain: AssociationDomain) -> Option<(AssociationTarget, f64)> {
        self.get(lemma)
            .iter()
            .find(|r| r.target.domain() == domain)
            .map(|r| (r.target, r.score))
    }
}

/// Match a verb token against the lexicon, trying its lemma then its surface form.
pub fn match_association(
    verb: &Token,
    lexicon: &AssociationLexicon,
    domain: AssociationDomain,
) -> Option<(AssociationTarget, f64)> {
    lexicon
        .best(&verb.lemma, domain)
        .or_else(|| lexicon.best(&verb.text, domain))
}
