//! Running one engine on one source case.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::Duration;

use wait_timeout::ChildExt;

use super::registry::{EngineKind, EngineSpec};
use super::EngineError;
use crate::config::Thresholds;
use crate::inference::{Position, ReplaceKind, TransformationKind, TransformationProposition};
use crate::scene::{
    apply_add, apply_remove, apply_replace, filter_add, filter_region, filter_translation,
    load_map, place_mask_add, save_map, FilterOutcome, FilterReason, MaskGallery, Rect,
};
use crate::util::write_atomic;

/// A source test case: a label map and, optionally, the photo it annotates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceCase {
    pub id: String,
    pub map: PathBuf,
    pub image: Option<PathBuf>,
}

impl SourceCase {
    /// The file a model or external engine should look at.
    pub fn primary(&self) -> &Path {
        self.image.as_deref().unwrap_or(&self.map)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EngineOutcome {
    Generated(PathBuf),
    Filtered(FilterReason),
}

/// Shared inputs of engine runs.
#[derive(Debug, Clone, Copy)]
pub struct EngineContext<'a> {
    pub thresholds: &'a Thresholds,
    pub gallery: &'a MaskGallery,
}

/// Extension a follow-up of this source gets from this engine.
pub fn output_extension(spec: &EngineSpec, source: &SourceCase) -> String {
    let from = match spec.kind {
        EngineKind::External => source.primary(),
        _ => &source.map,
    };
    from.extension()
        .map(|e| e.to_string_lossy().to_string())
        .unwrap_or_else(|| "pgm".to_string())
}

/// Apply `proposition` to `source`, writing the follow-up to `output`.
/// `work_dir` is private to this call.
pub fn run_engine(
    spec: &EngineSpec,
    source: &SourceCase,
    proposition: &TransformationProposition,
    ctx: EngineContext<'_>,
    output: &Path,
    work_dir: &Path,
) -> Result<EngineOutcome, EngineError> {
    match spec.kind {
        EngineKind::BuiltinManipulation => run_manipulation(source, proposition, ctx, output),
        EngineKind::BuiltinLabelEdit => run_label_edit(source, proposition, ctx, output),
        EngineKind::External => run_external(spec, source, proposition, ctx, output, work_dir),
    }
}

fn run_manipulation(
    source: &SourceCase,
    prop: &TransformationProposition,
    ctx: EngineContext<'_>,
    output: &Path,
) -> Result<EngineOutcome, EngineError> {
    if prop.kind != TransformationKind::Add {
        return Ok(EngineOutcome::Filtered(FilterReason::UnsupportedPosition));
    }
    if prop.position != Some(Position::On) {
        return Ok(EngineOutcome::Filtered(FilterReason::UnsupportedPosition));
    }
    let closer = match prop.comparative.as_deref() {
        None => false,
        Some("closer" | "nearer") => true,
        Some(_) => return Ok(EngineOutcome::Filtered(FilterReason::UnsupportedComparative)),
    };
    let reference = prop
        .reference
        .as_ref()
        .map(|r| r.element.name.as_str())
        .unwrap_or_default();
    let map = load_map(&source.map)?;
    let masks = ctx.gallery.masks(&prop.target.element.name);
    if masks.is_empty() {
        return Ok(EngineOutcome::Filtered(FilterReason::NoMask));
    }
    let mut reason = FilterReason::NoPosition;
    for mask in masks {
        let Some((x, y)) =
            place_mask_add(&map, mask, reference, closer, ctx.thresholds.closer_offset_fraction)
        else {
            continue;
        };
        let rect = Rect {
            x,
            y,
            width: mask.width,
            height: mask.height,
        };
        match filter_add(&map, rect) {
            FilterOutcome::Pass => {
                save_map(&apply_add(&map, mask, (x, y))?, output)?;
                return Ok(EngineOutcome::Generated(output.to_path_buf()));
            }
            FilterOutcome::Filtered(r) => reason = r,
        }
    }
    Ok(EngineOutcome::Filtered(reason))
}

fn run_label_edit(
    source: &SourceCase,
    prop: &TransformationProposition,
    ctx: EngineContext<'_>,
    output: &Path,
) -> Result<EngineOutcome, EngineError> {
    let map = load_map(&source.map)?;
    let target = &prop.target.element.name;
    if let FilterOutcome::Filtered(r) = filter_region(&map, target, ctx.thresholds.min_region_fraction) {
        return Ok(EngineOutcome::Filtered(r));
    }
    let edited = match (prop.kind, &prop.reference) {
        (TransformationKind::Remove, _) => apply_remove(&map, target)?,
        (TransformationKind::Replace, Some(r)) => apply_replace(&map, target, &r.element.name)?,
        _ => return Ok(EngineOutcome::Filtered(FilterReason::UnsupportedPosition)),
    };
    save_map(&edited, output)?;
    Ok(EngineOutcome::Generated(output.to_path_buf()))
}

fn substitute(template: &str, vars: &[(&str, &Path)]) -> Result<Vec<String>, EngineError> {
    let words = shell_words::split(template)
        .map_err(|e| EngineError::InvalidRegistry(format!("entry {template:?}: {e}")))?;
    Ok(words
        .into_iter()
        .map(|w| {
            vars.iter().fold(w, |acc, (k, v)| {
                acc.replace(&format!("{{{k}}}"), &v.display().to_string())
            })
        })
        .collect())
}

fn luma(path: &Path) -> Option<Vec<u8>> {
    Some(image::open(path).ok()?.to_luma8().into_raw())
}

fn run_external(
    spec: &EngineSpec,
    source: &SourceCase,
    prop: &TransformationProposition,
    ctx: EngineContext<'_>,
    output: &Path,
    work_dir: &Path,
) -> Result<EngineOutcome, EngineError> {
    let io = |p: &Path, e: std::io::Error| EngineError::Io {
        path: p.display().to_string(),
        message: e.to_string(),
    };
    std::fs::create_dir_all(work_dir).map_err(|e| io(work_dir, e))?;
    if let Some(parent) = output.parent() {
        std::fs::create_dir_all(parent).map_err(|e| io(parent, e))?;
    }
    let prop_path = work_dir.join("proposition.json");
    write_atomic(&prop_path, prop.to_json().to_string().as_bytes()).map_err(|e| io(&prop_path, e))?;

    let argv = substitute(
        spec.entry.as_deref().unwrap_or_default(),
        &[
            ("input", source.primary()),
            ("input_map", &source.map),
            ("proposition", &prop_path),
            ("output", output),
        ],
    )?;
    let (program, args) = argv
        .split_first()
        .ok_or_else(|| EngineError::InvalidRegistry(format!("engine {:?} has an empty entry", spec.name)))?;

    log::debug!("engine {}: {}", spec.name, argv.join(" "));
    let mut child = Command::new(program)
        .args(args)
        .current_dir(work_dir)
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| EngineError::EngineFailure {
            engine: spec.name.clone(),
            code: None,
            stderr: format!("cannot start {program:?}: {e}"),
        })?;
    let mut stderr_pipe = child.stderr.take();
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        if let Some(p) = stderr_pipe.as_mut() {
            let _ = p.read_to_string(&mut s);
        }
        s
    });
    let status = match child
        .wait_timeout(Duration::from_secs(spec.timeout_s))
        .map_err(|e| io(Path::new(program), e))?
    {
        Some(status) => status,
        None => {
            let _ = child.kill();
            let _ = child.wait();
            return Err(EngineError::Timeout {
                engine: spec.name.clone(),
                seconds: spec.timeout_s,
            });
        }
    };
    let stderr = reader.join().unwrap_or_default();

    match status.code() {
        Some(0) if output.exists() => {}
        Some(0) => {
            return Err(EngineError::EngineFailure {
                engine: spec.name.clone(),
                code: Some(0),
                stderr: format!("no output written to {}\n{stderr}", output.display()),
            })
        }
        Some(2) => return Ok(EngineOutcome::Filtered(FilterReason::EngineDeclined)),
        code => {
            return Err(EngineError::EngineFailure {
                engine: spec.name.clone(),
                code,
                stderr,
            })
        }
    }

    // Domain translations that leave the photo unchanged are discarded.
    let translation = matches!(prop.replace_kind, Some(ReplaceKind::Weather | ReplaceKind::Time));
    if translation {
        if let (Some(a), Some(b)) = (luma(source.primary()), luma(output)) {
            if let FilterOutcome::Filtered(r) = filter_translation(&a, &b, ctx.thresholds.mse_min) {
                return Ok(EngineOutcome::Filtered(r));
            }
        }
    }
    Ok(EngineOutcome::Generated(output.to_path_buf()))
}
