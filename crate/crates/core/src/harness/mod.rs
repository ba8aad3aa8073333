//! Predictions, verdicts, reports and threshold sweeps.

mod campaign;
mod evaluate;
mod predict;

use std::path::Path;

pub use campaign::{
    build_gallery, instantiate_template, load_campaign, run_campaign, run_generation,
    run_validation, sweep_csv, sweep_with_predictions, threshold_sweep, LoadedCampaign, SweepRow,
};
pub use evaluate::{evaluate_case, validate_cases, PairVerdict, Verdict, ViolationReport};
pub use predict::{collect_predictions, run_model_command, ModelSpec, PredictionRecord, Predictions};

use crate::config::ConfigError;
use crate::engines::EngineError;
use crate::inference::InferenceError;
use crate::scene::SceneError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("ModelCommandFailed: {0}")]
    ModelCommandFailed(String),
    #[error("MissingPrediction: no prediction for {0}")]
    MissingPrediction(String),
    #[error("DuplicatePrediction: {0} appears twice")]
    DuplicatePrediction(String),
    #[error("ArityMismatch: case {case_id} has {got} predictions, the relation needs {expected}")]
    ArityMismatch {
        case_id: String,
        expected: usize,
        got: usize,
    },
    #[error("CsvError: {0}")]
    Csv(String),
    #[error("TemplateError: {0}")]
    Template(String),
    #[error("RuleMismatch: {0}")]
    RuleMismatch(String),
    #[error("ConfigError: {0}")]
    Config(String),
    #[error("IoError: {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Configuration(#[from] ConfigError),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}
