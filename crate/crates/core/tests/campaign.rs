use std::collections::HashSet;

use rmt::config::{Config, Thresholds};
use rmt::engines::{
    generate_campaign, EngineContext, EngineKind, EngineRegistry, EngineSpec, Support,
};
use rmt::inference::{parse_rule, TransformationKind};
use rmt::ontology::Ontology;
use rmt::scene::{synthetic_gallery, write_synthetic_dataset, SceneParams};

const R1: &str = "If: a pedestrian appears on the roadside,\nThen: the ego-vehicle should slow down.";

#[test]
fn reruns_write_identical_manifests() {
    let data = tempfile::tempdir().unwrap();
    write_synthetic_dataset(data.path(), 12, &SceneParams::default(), 9).unwrap();
    let o = Ontology::builtin();
    let th = Thresholds::default();
    let mr = parse_rule(R1, &o, &th).unwrap().mr;
    let gallery = synthetic_gallery(128);
    let ctx = EngineContext { thresholds: &th, gallery: &gallery };
    let out = tempfile::tempdir().unwrap();
    let reg = EngineRegistry::defaults(&o);
    let a = generate_campaign(&reg, &mr, data.path(), out.path(), ctx, 4).unwrap();
    let first = std::fs::read(&a.manifest).unwrap();
    let followups: Vec<Vec<u8>> = a.cases.iter().flat_map(|c| &c.followups).map(|p| std::fs::read(p).unwrap()).collect();
    let b = generate_campaign(&reg, &mr, data.path(), out.path(), ctx, 1).unwrap();
    assert_eq!(first, std::fs::read(&b.manifest).unwrap());
    let again: Vec<Vec<u8>> = b.cases.iter().flat_map(|c| &c.followups).map(|p| std::fs::read(p).unwrap()).collect();
    assert_eq!(followups, again);
}

#[test]
fn parallel_external_runs_get_private_work_dirs() {
    let data = tempfile::tempdir().unwrap();
    write_synthetic_dataset(data.path(), 16, &SceneParams::default(), 1).unwrap();
    let out = tempfile::tempdir().unwrap();
    let log = out.path().join("cwd.log");
    // Each run records its working directory, then copies the input.
    let entry = format!(
        "sh -c 'pwd >> {log} && cp \"$0\" \"$1\"' {{input}} {{output}}",
        log = log.display()
    );
    let config = Config {
        registry: EngineRegistry::new(vec![EngineSpec {
            name: "copy".into(),
            kind: EngineKind::External,
            entry: Some(entry),
            support: vec![Support {
                transformation: TransformationKind::Add,
                elements: vec!["pedestrian".into()],
            }],
            timeout_s: 30,
        }])
        .unwrap(),
        workers: 8,
        ..Config::default()
    };
    let mr = parse_rule(R1, &config.ontology, &config.thresholds).unwrap().mr;
    let gallery = synthetic_gallery(128);
    let ctx = EngineContext { thresholds: &config.thresholds, gallery: &gallery };
    let c = generate_campaign(&config.registry, &mr, data.path(), out.path(), ctx, config.workers).unwrap();
    assert_eq!(c.generated(), 16);
    let dirs: Vec<String> = std::fs::read_to_string(&log).unwrap().lines().map(String::from).collect();
    assert_eq!(dirs.len(), 16);
    assert_eq!(dirs.iter().collect::<HashSet<_>>().len(), 16);
}
