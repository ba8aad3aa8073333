//! Plug an external command in as the "driving time changes into night"
//! engine. This example doubles as the engine: run with `--night <in> <out>`
//! it darkens a photo.
//!
//!     cargo run --example external_engine

use std::path::Path;

use rmt::config::Config;
use rmt::engines::{EngineKind, EngineRegistry, EngineSpec, Support};
use rmt::harness::run_generation;
use rmt::inference::TransformationKind;
use rmt::scene::{synthetic_scene, save_map, SceneParams};

const RULE: &str = "If: the driving time changes into night,\nThen: the ego-vehicle should slow down.";

fn darken(input: &Path, output: &Path, factor: f32) -> Result<(), Box<dyn std::error::Error>> {
    let mut img = image::open(input)?.to_luma8();
    for p in img.pixels_mut() {
        p.0[0] = (p.0[0] as f32 * factor) as u8;
    }
    img.save(output)?;
    Ok(())
}

fn engine(name: &str, entry: String) -> EngineSpec {
    EngineSpec {
        name: name.into(),
        kind: EngineKind::External,
        entry: Some(entry),
        support: vec![Support {
            transformation: TransformationKind::Replace,
            elements: vec!["time".into()],
        }],
        timeout_s: 30,
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().collect();
    if args.len() == 4 && args[1] == "--night" {
        return darken(Path::new(&args[2]), Path::new(&args[3]), 0.3);
    }

    let root = tempfile::tempdir()?;
    let data = root.path().join("data");
    std::fs::create_dir_all(&data)?;
    // Each label map gets a same-stem "photo"; engines see the photo.
    for i in 0..4 {
        let map = synthetic_scene(&SceneParams::default(), i);
        let stem = data.join(format!("frame_{i}"));
        save_map(&map, &stem.with_extension("pgm"))?;
        let photo: Vec<u8> = map.grid.chunks(map.width).rev().flatten().map(|&id| 40 + id * 20).collect();
        image::GrayImage::from_raw(map.width as u32, map.height as u32, photo)
            .ok_or("photo size")?
            .save(stem.with_extension("png"))?;
    }

    let me = std::env::current_exe()?;
    for (name, entry) in [
        ("night", format!("{} --night {{input}} {{output}}", me.display())),
        ("identity", "cp {input} {output}".to_string()),
        ("declines", "sh -c 'exit 2'".to_string()),
    ] {
        let config = Config {
            registry: EngineRegistry::new(vec![engine(name, entry)])?,
            ..Config::default()
        };
        let out = root.path().join(name);
        let (_, campaign) = run_generation(&config, RULE, &data, &out)?;
        println!("engine {name}:");
        for c in &campaign.cases {
            println!("  {} {} {:?}", c.case_id, c.status, c.followups.iter().map(|p| p.display().to_string()).collect::<Vec<_>>());
        }
    }
    Ok(())
}
