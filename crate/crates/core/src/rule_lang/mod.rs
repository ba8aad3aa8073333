//! Controlled-language front end: tokens, tags, blocks and dependencies.

mod blocks;
mod deps;
mod tagger;
mod token;

pub use blocks::{split_blocks, IftttBlock};
pub use deps::{extract_dependencies, root_index, DependencyPredicate, Relation};
pub use tagger::{pos_tag, PosLexicon};
pub use token::{lemmatize, render, tokenize, Pos, Token};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("MalformedRule: {0}")]
    MalformedRule(String),
    #[error("NoRootVerb: no verb in clause {0:?}")]
    NoRootVerb(String),
}
