//! Follow-up generation over a dataset and the manifest it leaves behind.

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::registry::{select_engine, EngineRegistry, EngineSpec};
use super::run::{output_extension, run_engine, EngineContext, EngineOutcome, SourceCase};
use super::EngineError;
use crate::inference::MetamorphicRelation;
use crate::scene::{sidecar_path, FilterReason};
use crate::util::write_atomic;

const IMAGE_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseStatus {
    Generated,
    Filtered(FilterReason),
}

impl fmt::Display for CaseStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseStatus::Generated => f.write_str("generated"),
            CaseStatus::Filtered(r) => write!(f, "filtered({r})"),
        }
    }
}

impl CaseStatus {
    pub fn parse(s: &str) -> Option<Self> {
        if s == "generated" {
            return Some(CaseStatus::Generated);
        }
        let inner = s.strip_prefix("filtered(")?.strip_suffix(')')?;
        FilterReason::parse(inner).map(CaseStatus::Filtered)
    }

    pub fn is_generated(self) -> bool {
        self == CaseStatus::Generated
    }
}

/// One manifest entry.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedCase {
    pub case_id: String,
    pub source: PathBuf,
    pub followups: Vec<PathBuf>,
    pub proposition: serde_json::Value,
    pub status: CaseStatus,
}

impl GeneratedCase {
    /// Prediction keys: the source stem, then `<stem>__g1`, `<stem>__g2`.
    pub fn image_ids(&self) -> Vec<String> {
        std::iter::once(&self.source)
            .chain(&self.followups)
            .map(|p| image_id(p))
            .collect()
    }
}

/// File stem used to key predictions.
pub fn image_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_default()
}

#[derive(Serialize, Deserialize)]
struct ManifestLine {
    case_id: String,
    source: String,
    followups: Vec<String>,
    proposition: serde_json::Value,
    status: String,
}

pub fn write_manifest(path: &Path, cases: &[GeneratedCase]) -> Result<(), EngineError> {
    let mut out = String::new();
    for c in cases {
        let line = ManifestLine {
            case_id: c.case_id.clone(),
            source: c.source.display().to_string(),
            followups: c.followups.iter().map(|p| p.display().to_string()).collect(),
            proposition: c.proposition.clone(),
            status: c.status.to_string(),
        };
        out.push_str(&serde_json::to_string(&line).expect("manifest line serializes"));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes()).map_err(|e| EngineError::io(path, e))
}

/// Relative paths in a manifest resolve against the manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<GeneratedCase>, EngineError> {
    let text = std::fs::read_to_string(path).map_err(|e| EngineError::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let resolve = |s: &str| {
        let p = PathBuf::from(s);
        if p.is_absolute() {
            p
        } else {
            base.join(p)
        }
    };
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let bad = |m: String| EngineError::Manifest(format!("{}:{}: {m}", path.display(), i + 1));
            let line: ManifestLine = serde_json::from_str(l).map_err(|e| bad(e.to_string()))?;
            let status = CaseStatus::parse(&line.status)
                .ok_or_else(|| bad(format!("unknown status {:?}", line.status)))?;
            Ok(GeneratedCase {
                case_id: line.case_id,
                source: resolve(&line.source),
                followups: line.followups.iter().map(|s| resolve(s)).collect(),
                proposition: line.proposition,
                status,
            })
        })
        .collect()
}

/// Label maps (`*.pgm` with a palette sidecar) in `dir`, by name, each
/// paired with a same-stem photo when one exists.
pub fn discover_sources(dir: &Path) -> Result<Vec<SourceCase>, EngineError> {
    let read = std::fs::read_dir(dir).map_err(|e| EngineError::io(dir, e))?;
    let mut maps: Vec<PathBuf> = read
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "pgm") && sidecar_path(p).exists())
        .collect();
    maps.sort();
    let sources: Vec<SourceCase> = maps
        .into_iter()
        .map(|map| {
            let image = IMAGE_EXTENSIONS
                .iter()
                .map(|ext| map.with_extension(ext))
                .find(|p| p.exists());
            SourceCase {
                id: image_id(&map),
                map,
                image,
            }
        })
        .collect();
    if sources.is_empty() {
        return Err(EngineError::EmptyDataset(dir.display().to_string()));
    }
    Ok(sources)
}

/// Everything a finished generation step produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    pub cases: Vec<GeneratedCase>,
    pub manifest: PathBuf,
}

impl Campaign {
    pub fn generated(&self) -> usize {
        self.cases.iter().filter(|c| c.status.is_generated()).count()
    }
}

fn generate_case(
    engines: &[&EngineSpec],
    mr: &MetamorphicRelation,
    source: &SourceCase,
    ctx: EngineContext<'_>,
    out_dir: &Path,
) -> Result<GeneratedCase, EngineError> {
    let mut followups = Vec::new();
    let mut status = CaseStatus::Generated;
    for (k, (block, spec)) in mr.blocks.iter().zip(engines).enumerate() {
        let tag = format!("g{}", k + 1);
        let ext = output_extension(spec, source);
        let output = out_dir
            .join("followups")
            .join(format!("{}__{tag}.{ext}", source.id));
        let work = out_dir.join("work").join(&source.id).join(&tag);
        match run_engine(spec, source, &block.proposition, ctx, &output, &work)? {
            EngineOutcome::Generated(p) => followups.push(p),
            EngineOutcome::Filtered(r) => {
                status = CaseStatus::Filtered(r);
                followups.clear();
                break;
            }
        }
    }
    Ok(GeneratedCase {
        case_id: source.id.clone(),
        source: source.primary().to_path_buf(),
        followups,
        proposition: serde_json::Value::Array(
            mr.blocks.iter().map(|b| b.proposition.to_json()).collect(),
        ),
        status,
    })
}

/// Generate follow-ups for every source of `dataset_dir` under `out_dir`
/// and write `out_dir/manifest.jsonl`. Chained relations get a second
/// follow-up from the same source.
pub fn generate_campaign(
    registry: &EngineRegistry,
    mr: &MetamorphicRelation,
    dataset_dir: &Path,
    out_dir: &Path,
    ctx: EngineContext<'_>,
    workers: usize,
) -> Result<Campaign, EngineError> {
    let engines = mr
        .blocks
        .iter()
        .map(|b| select_engine(registry, &b.proposition))
        .collect::<Result<Vec<_>, _>>()?;
    let dataset_dir = std::path::absolute(dataset_dir).map_err(|e| EngineError::io(dataset_dir, e))?;
    let out_dir = std::path::absolute(out_dir).map_err(|e| EngineError::io(out_dir, e))?;
    let sources = discover_sources(&dataset_dir)?;
    std::fs::create_dir_all(out_dir.join("followups")).map_err(|e| EngineError::io(&out_dir, e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| EngineError::InvalidRegistry(format!("worker pool: {e}")))?;
    let mut cases = pool.install(|| {
        sources
            .par_iter()
            .map(|s| generate_case(&engines, mr, s, ctx, &out_dir))
            .collect::<Result<Vec<_>, _>>()
    })?;
    cases.sort_by(|a, b| a.case_id.cmp(&b.case_id));

    let manifest = out_dir.join("manifest.jsonl");
    write_manifest(&manifest, &cases)?;
    log::info!(
        "{} of {} cases generated, manifest at {}",
        cases.iter().filter(|c| c.status.is_generated()).count(),
        cases.len(),
        manifest.display()
    );
    Ok(Campaign { cases, manifest })
}
