//! Model predictions from a CSV file or a model command.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::engines::{image_id, GeneratedCase};
use crate::inference::Behavior;
use crate::util::write_atomic;

const STEERING_RANGE: f64 = 25.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub image_id: String,
    pub behavior: String,
    pub value: f64,
}

/// Where predictions come from. Exactly one field is set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predictions_csv: Option<PathBuf>,
}

/// Predictions keyed by (image id, behavior).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Predictions {
    values: HashMap<(String, Behavior), f64>,
}

impl Predictions {
    pub fn get(&self, image_id: &str, behavior: Behavior) -> Option<f64> {
        self.values.get(&(image_id.to_string(), behavior)).copied()
    }

    pub fn insert(&mut self, image_id: &str, behavior: Behavior, value: f64) {
        self.values.insert((image_id.to_string(), behavior), value);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Records from CSV text with header `image_id,behavior,value`.
    pub fn from_csv(text: &str) -> Result<Self, HarnessError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut out = Self::default();
        for row in reader.deserialize::<PredictionRecord>() {
            let rec = row.map_err(|e| HarnessError::Csv(e.to_string()))?;
            let behavior = Behavior::parse(&rec.behavior)
                .ok_or_else(|| HarnessError::Csv(format!("unknown behavior {:?}", rec.behavior)))?;
            if !rec.value.is_finite() {
                return Err(HarnessError::Csv(format!("non-finite value for {}", rec.image_id)));
            }
            if behavior == Behavior::Steering && rec.value.abs() > STEERING_RANGE {
                log::warn!("steering {} for {} is outside [-25, 25]", rec.value, rec.image_id);
            }
            let key = (rec.image_id.clone(), behavior);
            if out.values.insert(key, rec.value).is_some() {
                return Err(HarnessError::DuplicatePrediction(format!("{},{}", rec.image_id, behavior)));
            }
        }
        Ok(out)
    }

    pub fn to_csv(&self) -> String {
        let mut keys: Vec<_> = self.values.keys().collect();
        keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.as_str().cmp(b.1.as_str())));
        let mut w = csv::Writer::from_writer(Vec::new());
        for k in keys {
            w.serialize(PredictionRecord {
                image_id: k.0.clone(),
                behavior: k.1.as_str().to_string(),
                value: self.values[k],
            })
            .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
    }
}

/// Paths of every image of every generated case, sources first.
fn needed_files(cases: &[GeneratedCase]) -> Vec<PathBuf> {
    cases
        .iter()
        .filter(|c| c.status.is_generated())
        .flat_map(|c| std::iter::once(c.source.clone()).chain(c.followups.iter().cloned()))
        .collect()
}

/// Run a model command. The command receives the path of a file listing
/// one image per line, either at `{files}` or as its last argument, and
/// prints prediction CSV on stdout.
pub fn run_model_command(command: &str, files: &[PathBuf], work_dir: &Path) -> Result<Predictions, HarnessError> {
    let list = work_dir.join("model_inputs.txt");
    let body: String = files.iter().map(|p| format!("{}\n", p.display())).collect();
    write_atomic(&list, body.as_bytes()).map_err(|e| HarnessError::io(&list, e))?;

    let mut argv = shell_words::split(command)
        .map_err(|e| HarnessError::ModelCommandFailed(format!("{command:?}: {e}")))?;
    let list_s = list.display().to_string();
    if argv.iter().any(|a| a.contains("{files}")) {
        for a in argv.iter_mut() {
            *a = a.replace("{files}", &list_s);
        }
    } else {
        argv.push(list_s);
    }
    let (program, args) = argv
        .split_first()
        .ok_or_else(|| HarnessError::ModelCommandFailed("empty model command".into()))?;
    let out = Command::new(program)
        .args(args)
        .output()
        .map_err(|e| HarnessError::ModelCommandFailed(format!("cannot start {program:?}: {e}")))?;
    if !out.status.success() {
        return Err(HarnessError::ModelCommandFailed(format!(
            "{program:?} exited with {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr).trim()
        )));
    }
    Predictions::from_csv(&String::from_utf8_lossy(&out.stdout))
}

/// Predictions for every image of every generated case, for each of
/// `behaviors`. A missing record is an error.
pub fn collect_predictions(
    cases: &[GeneratedCase],
    model: &ModelSpec,
    behaviors: &[Behavior],
    work_dir: &Path,
) -> Result<Predictions, HarnessError> {
    let files = needed_files(cases);
    let predictions = match (&model.command, &model.predictions_csv) {
        (Some(cmd), None) => run_model_command(cmd, &files, work_dir)?,
        (None, Some(csv_path)) => {
            let text = std::fs::read_to_string(csv_path).map_err(|e| HarnessError::io(csv_path, e))?;
            Predictions::from_csv(&text)?
        }
        _ => {
            return Err(HarnessError::Config(
                "model needs exactly one of `command` or `predictions_csv`".into(),
            ))
        }
    };
    for f in &files {
        let id = image_id(f);
        for &b in behaviors {
            if predictions.get(&id, b).is_none() {
                return Err(HarnessError::MissingPrediction(format!("{id} ({b})")));
            }
        }
    }
    Ok(predictions)
}
