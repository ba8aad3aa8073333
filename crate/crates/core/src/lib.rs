pub mod cli;
pub mod config;
pub mod engines;
pub mod harness;
pub mod inference;
pub mod ontology;
pub mod rule_lang;
pub mod scene;
pub mod util;
