//! Mask extraction, placement, and the three edits on a synthetic label map.
//! Writes PGM files plus palette sidecars into a temporary directory.
//!
//!     cargo run --example label_map_editing

use rmt::scene::{
    apply_add, apply_remove, apply_replace, extract_mask, filter_add, load_map, place_mask_add,
    save_map, synthetic_scene, Rect, SceneParams,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let params = SceneParams::default();
    let scene = (0..50)
        .map(|s| synthetic_scene(&params, s))
        .find(|m| m.count("pedestrian") > 0)
        .expect("some seed has a pedestrian");
    let src = dir.path().join("scene.pgm");
    save_map(&scene, &src)?;
    let scene = load_map(&src)?;
    println!("loaded {}x{} map with {} classes", scene.width, scene.height, scene.palette.len());

    let mask = extract_mask(&scene, "pedestrian")?.expect("pedestrian present");
    println!("pedestrian mask {}x{}, {} opaque pixels", mask.width, mask.height, mask.opaque_count());

    for closer in [false, true] {
        match place_mask_add(&scene, &mask, "sidewalk", closer, 0.15) {
            Some((x, y)) => {
                let rect = Rect { x, y, width: mask.width, height: mask.height };
                println!("closer={closer}: bottom-left ({x}, {y}), filter {:?}", filter_add(&scene, rect));
                let added = apply_add(&scene, &mask, (x, y))?;
                println!("  pedestrian pixels {} -> {}", scene.count("pedestrian"), added.count("pedestrian"));
            }
            None => println!("closer={closer}: no position"),
        }
    }

    let no_lines = apply_remove(&scene, "line")?;
    println!("remove line: {} -> {} line pixels", scene.count("line"), no_lines.count("line"));
    let trees = apply_replace(&scene, "building", "tree")?;
    println!("replace building: {} trees -> {}", scene.count("tree"), trees.count("tree"));
    save_map(&trees, &dir.path().join("trees.pgm"))?;
    println!("written to {}", dir.path().display());
    Ok(())
}
