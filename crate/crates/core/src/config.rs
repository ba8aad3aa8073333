//! Configuration document.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engines::{EngineError, EngineRegistry, EngineSpec};
use crate::harness::ModelSpec;
use crate::ontology::{Ontology, OntologyError};

/// Numeric knobs of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub wup_threshold: f64,
    pub delta_speed: f64,
    pub delta_steering: f64,
    pub min_region_fraction: f64,
    pub mse_min: f64,
    pub closer_offset_fraction: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            wup_threshold: 0.75,
            delta_speed: 0.0,
            delta_steering: 1.39,
            min_region_fraction: 0.005,
            mse_min: 100.0,
            closer_offset_fraction: 0.15,
        }
    }
}

impl Thresholds {
    /// Name of the first negative or non-finite threshold.
    pub fn invalid_field(&self) -> Option<&'static str> {
        [
            ("wup_threshold", self.wup_threshold),
            ("delta_speed", self.delta_speed),
            ("delta_steering", self.delta_steering),
            ("min_region_fraction", self.min_region_fraction),
            ("mse_min", self.mse_min),
            ("closer_offset_fraction", self.closer_offset_fraction),
        ]
        .into_iter()
        .find(|(_, v)| !v.is_finite() || *v < 0.0)
        .map(|(k, _)| k)
    }
}

/// Everything the pipeline reads from a configuration document.
#[derive(Debug, Clone)]
pub struct Config {
    pub ontology: Ontology,
    pub thresholds: Thresholds,
    pub registry: EngineRegistry,
    pub model: Option<ModelSpec>,
    pub workers: usize,
    pub gallery: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    #[allow(dead_code)]
    ontology: Option<serde_yaml::Value>,
    #[serde(default)]
    #[allow(dead_code)]
    lexicon: Option<serde_yaml::Value>,
    #[serde(default)]
    thresholds: Thresholds,
    #[serde(default)]
    engines: Option<Vec<EngineSpec>>,
    #[serde(default)]
    model: Option<ModelSpec>,
    #[serde(default)]
    workers: Option<usize>,
    #[serde(default)]
    gallery: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("SchemaError at {path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("IoError: {path}: {message}")]
    Io { path: String, message: String },
}

fn schema(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl Default for Config {
    fn default() -> Self {
        let ontology = Ontology::builtin();
        Self {
            registry: EngineRegistry::defaults(&ontology),
            ontology,
            thresholds: Thresholds::default(),
            model: None,
            workers: default_workers(),
            gallery: None,
        }
    }
}

impl Config {
    /// Parse a configuration document. Relative paths resolve against
    /// `base_dir`.
    pub fn from_yaml(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut value: serde_yaml::Value = if text.trim().is_empty() {
            serde_yaml::Value::Null
        } else {
            serde_yaml::from_str(text).map_err(|e| schema("$", e.to_string()))?
        };
        if value.is_null() {
            value = serde_yaml::Value::Mapping(Default::default());
        }
        let raw: RawConfig = serde_path_to_error::deserialize(value.clone())
            .map_err(|e| schema(&e.path().to_string(), e.inner().to_string()))?;

        // A top-level `lexicon:` is shorthand for `ontology.lexicon`.
        if let Some(m) = value.as_mapping_mut() {
            if let Some(lex) = m.remove("lexicon") {
                let onto = m
                    .entry("ontology".into())
                    .or_insert_with(|| serde_yaml::Value::Mapping(Default::default()));
                let onto = onto
                    .as_mapping_mut()
                    .ok_or_else(|| schema("ontology", "expected a mapping"))?;
                let slot = onto
                    .entry("lexicon".into())
                    .or_insert_with(|| serde_yaml::Value::Mapping(Default::default()));
                match (slot.as_mapping_mut(), lex) {
                    (Some(dst), serde_yaml::Value::Mapping(src)) => {
                        for (k, v) in src {
                            match (dst.get_mut(&k), v) {
                                (Some(serde_yaml::Value::Sequence(a)), serde_yaml::Value::Sequence(b)) => {
                                    a.extend(b)
                                }
                                (_, v) => {
                                    dst.insert(k, v);
                                }
                            }
                        }
                    }
                    _ => return Err(schema("lexicon", "expected a mapping")),
                }
            }
        }
        let ontology = Ontology::load(&serde_yaml::to_string(&value).expect("yaml re-serializes"))?;

        if let Some(field) = raw.thresholds.invalid_field() {
            return Err(schema(
                &format!("thresholds.{field}"),
                "must be a finite non-negative number",
            ));
        }
        let workers = match raw.workers {
            Some(0) => return Err(schema("workers", "must be positive")),
            Some(n) => n,
            None => default_workers(),
        };
        let registry = match raw.engines {
            Some(specs) => EngineRegistry::new(specs)?,
            None => EngineRegistry::defaults(&ontology),
        };
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base_dir.join(p) };
        let model = raw.model.map(|m| ModelSpec {
            command: m.command,
            predictions_csv: m.predictions_csv.map(resolve),
        });
        Ok(Self {
            ontology,
            thresholds: raw.thresholds,
            registry,
            model,
            workers,
            gallery: raw.gallery.map(resolve),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_yaml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// The model section, which must name exactly one prediction source.
    pub fn model(&self) -> Result<&ModelSpec, ConfigError> {
        match &self.model {
            Some(m) if m.command.is_some() != m.predictions_csv.is_some() => Ok(m),
            Some(_) => Err(schema("model", "set exactly one of `command` or `predictions_csv`")),
            None => Err(schema("model", "a model section is required for validation")),
        }
    }
}
