//! Transformation engines: built-in mask manipulation, built-in label
//! editing, and external commands.

mod campaign;
mod registry;
mod run;

use std::path::Path;

pub use campaign::{
    discover_sources, generate_campaign, image_id, read_manifest, write_manifest, Campaign,
    CaseStatus, GeneratedCase,
};
pub use registry::{select_engine, EngineKind, EngineRegistry, EngineSpec, Support};
pub use run::{output_extension, run_engine, EngineContext, EngineOutcome, SourceCase};

use crate::scene::SceneError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("NoEngineSupports: no engine supports {kind} of {element:?}")]
    NoEngineSupports { kind: String, element: String },
    #[error("EngineFailure: engine {engine:?} exited with {}: {stderr}", code.map_or("a signal".to_string(), |c| format!("code {c}")))]
    EngineFailure {
        engine: String,
        code: Option<i32>,
        stderr: String,
    },
    #[error("Timeout: engine {engine:?} ran longer than {seconds} s")]
    Timeout { engine: String, seconds: u64 },
    #[error("EmptyDataset: no label maps in {0}")]
    EmptyDataset(String),
    #[error("InvalidRegistry: {0}")]
    InvalidRegistry(String),
    #[error("ManifestError: {0}")]
    Manifest(String),
    #[error("IoError: {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Scene(#[from] SceneError),
}

impl EngineError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        EngineError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Thresholds;
    use crate::inference::{parse_rule, MetamorphicRelation};
    use crate::ontology::Ontology;
    use crate::scene::{load_map, synthetic_gallery, write_synthetic_dataset, FilterReason, SceneParams};

    const ADD: &str = "If: a pedestrian appears on the roadside,\nThen: the ego-vehicle should slow down.";
    const CHAIN: &str = "If: a pedestrian appears on the roadside,\nThen: the ego-vehicle should slow down.\nIf: he gets closer to the ego-vehicle,\nThen: the speed should decrease more.";
    const NIGHT: &str = "If: the driving time changes into night,\nThen: the ego-vehicle should slow down.";
    const BUILDINGS: &str = "If: the buildings are replaced with trees,\nThen: the steering angle of ego-vehicle should keep the same.";

    fn mr(text: &str) -> MetamorphicRelation {
        parse_rule(text, &Ontology::builtin(), &Thresholds::default()).unwrap().mr
    }

    fn external(name: &str, entry: &str, elements: &[&str]) -> EngineSpec {
        EngineSpec {
            name: name.into(),
            kind: EngineKind::External,
            entry: Some(entry.into()),
            support: vec![Support {
                transformation: crate::inference::TransformationKind::Add,
                elements: elements.iter().map(|s| s.to_string()).collect(),
            }],
            timeout_s: 10,
        }
    }

    fn dataset(n: usize) -> tempfile::TempDir {
        let d = tempfile::tempdir().unwrap();
        write_synthetic_dataset(d.path(), n, &SceneParams::default(), 3).unwrap();
        d
    }

    #[test]
    fn selection_follows_declaration_order() {
        let o = Ontology::builtin();
        let mut specs = vec![external("first", "true", &["pedestrian"])];
        specs.extend(EngineRegistry::defaults(&o).specs().iter().cloned());
        let reg = EngineRegistry::new(specs).unwrap();
        let p = &mr(ADD).blocks[0].proposition;
        assert_eq!(select_engine(&reg, p).unwrap().name, "first");
        let d = EngineRegistry::defaults(&o);
        assert_eq!(select_engine(&d, p).unwrap().name, "builtin_manipulation");
        assert_eq!(
            select_engine(&d, &mr(BUILDINGS).blocks[0].proposition).unwrap().name,
            "builtin_label_edit"
        );
    }

    #[test]
    fn time_replace_needs_an_external_engine() {
        let d = EngineRegistry::defaults(&Ontology::builtin());
        let err = select_engine(&d, &mr(NIGHT).blocks[0].proposition).unwrap_err();
        assert!(matches!(err, EngineError::NoEngineSupports { ref kind, ref element } if kind == "replace" && element == "time"));
    }

    #[test]
    fn registry_validation() {
        let e = external("x", "true", &["pedestrian"]);
        assert!(EngineRegistry::new(vec![e.clone(), e.clone()]).is_err());
        let mut no_entry = e.clone();
        no_entry.entry = Some("  ".into());
        assert!(EngineRegistry::new(vec![no_entry]).is_err());
        let mut none = e;
        none.support.clear();
        assert!(EngineRegistry::new(vec![none]).is_err());
    }

    #[test]
    fn builtin_add_only_turns_background_into_target() {
        let data = dataset(4);
        let out = tempfile::tempdir().unwrap();
        let o = Ontology::builtin();
        let th = Thresholds::default();
        let gallery = synthetic_gallery(SceneParams::default().height);
        let ctx = EngineContext { thresholds: &th, gallery: &gallery };
        let c = generate_campaign(&EngineRegistry::defaults(&o), &mr(ADD), data.path(), out.path(), ctx, 2).unwrap();
        assert_eq!(c.cases.len(), 4);
        assert!(c.generated() > 0);
        for case in c.cases.iter().filter(|c| c.status.is_generated()) {
            let a = load_map(&case.source).unwrap();
            let b = load_map(&case.followups[0]).unwrap();
            assert_eq!(case.followups[0].file_name().unwrap().to_string_lossy(), format!("{}__g1.pgm", case.case_id));
            let mut changed = 0;
            for y in 0..a.height {
                for x in 0..a.width {
                    let (ca, cb) = (a.class_name(a.get(x, y)), b.class_name(b.get(x, y)));
                    if ca != cb {
                        assert_eq!(cb, Some("pedestrian"));
                        changed += 1;
                    }
                }
            }
            assert_eq!(b.count("pedestrian"), a.count("pedestrian") + changed);
            assert!(changed > 0);
        }
        let back = read_manifest(&c.manifest).unwrap();
        assert_eq!(back, c.cases);
    }

    #[test]
    fn chained_relations_get_two_followups() {
        let data = dataset(3);
        let out = tempfile::tempdir().unwrap();
        let th = Thresholds::default();
        let gallery = synthetic_gallery(SceneParams::default().height);
        let ctx = EngineContext { thresholds: &th, gallery: &gallery };
        let reg = EngineRegistry::defaults(&Ontology::builtin());
        let c = generate_campaign(&reg, &mr(CHAIN), data.path(), out.path(), ctx, 1).unwrap();
        for case in &c.cases {
            match case.status {
                CaseStatus::Generated => {
                    assert_eq!(case.followups.len(), 2);
                    assert_eq!(case.image_ids()[2], format!("{}__g2", case.case_id));
                }
                CaseStatus::Filtered(_) => assert!(case.followups.is_empty()),
            }
            assert_eq!(case.proposition.as_array().unwrap().len(), 2);
        }
    }

    #[test]
    fn empty_dataset_is_an_error() {
        let data = tempfile::tempdir().unwrap();
        let out = tempfile::tempdir().unwrap();
        let th = Thresholds::default();
        let gallery = synthetic_gallery(128);
        let ctx = EngineContext { thresholds: &th, gallery: &gallery };
        let reg = EngineRegistry::defaults(&Ontology::builtin());
        let err = generate_campaign(&reg, &mr(ADD), data.path(), out.path(), ctx, 1).unwrap_err();
        assert!(matches!(err, EngineError::EmptyDataset(_)));
    }

    #[test]
    fn external_engines_copy_decline_and_fail() {
        let data = dataset(2);
        let th = Thresholds::default();
        let gallery = synthetic_gallery(128);
        let ctx = EngineContext { thresholds: &th, gallery: &gallery };
        let p = mr(ADD).blocks[0].proposition.clone();
        let run = |entry: &str| {
            let out = tempfile::tempdir().unwrap();
            let reg = EngineRegistry::new(vec![external("ext", entry, &["pedestrian"])]).unwrap();
            let r = generate_campaign(&reg, &mr(ADD), data.path(), out.path(), ctx, 1);
            (out, r)
        };

        let (_keep, copied) = run("cp {input} {output}");
        let copied = copied.unwrap();
        assert_eq!(copied.generated(), 2);
        let case = &copied.cases[0];
        assert_eq!(std::fs::read(&case.source).unwrap(), std::fs::read(&case.followups[0]).unwrap());

        let (_keep, declined) = run("sh -c 'exit 2'");
        assert!(declined
            .unwrap()
            .cases
            .iter()
            .all(|c| c.status == CaseStatus::Filtered(FilterReason::EngineDeclined)));

        let (_keep, failed) = run("sh -c 'echo broken >&2; exit 7'");
        match failed.unwrap_err() {
            EngineError::EngineFailure { code, stderr, .. } => {
                assert_eq!(code, Some(7));
                assert!(stderr.contains("broken"));
            }
            e => panic!("unexpected {e}"),
        }

        let out = tempfile::tempdir().unwrap();
        let mut slow = external("slow", "sleep 5", &["pedestrian"]);
        slow.timeout_s = 1;
        let reg = EngineRegistry::new(vec![slow]).unwrap();
        let src = discover_sources(data.path()).unwrap();
        let err = run_engine(&reg.specs()[0], &src[0], &p, ctx, &out.path().join("o.pgm"), out.path()).unwrap_err();
        assert!(matches!(err, EngineError::Timeout { seconds: 1, .. }));
    }
}
