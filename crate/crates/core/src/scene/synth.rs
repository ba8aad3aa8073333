//! Procedural street scenes for demos, tests and benchmarks.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::map::{save_map, SemanticLabelMap, TRANSPARENT};
use super::mask::{Mask, MaskGallery};
use super::SceneError;

pub const ROAD_ID: u8 = 0;
pub const SIDEWALK_ID: u8 = 1;
pub const SKY_ID: u8 = 2;
pub const BUILDING_ID: u8 = 3;
pub const TREE_ID: u8 = 4;
pub const LINE_ID: u8 = 5;
pub const PEDESTRIAN_ID: u8 = 6;
pub const VEHICLE_ID: u8 = 7;
pub const TRAFFIC_SIGN_ID: u8 = 8;
pub const BICYCLIST_ID: u8 = 9;

/// Palette shared by every synthetic scene.
pub fn synthetic_palette() -> BTreeMap<u8, String> {
    [
        (ROAD_ID, "road"),
        (SIDEWALK_ID, "sidewalk"),
        (SKY_ID, "sky"),
        (BUILDING_ID, "building"),
        (TREE_ID, "tree"),
        (LINE_ID, "line"),
        (PEDESTRIAN_ID, "pedestrian"),
        (VEHICLE_ID, "vehicle"),
        (TRAFFIC_SIGN_ID, "traffic sign"),
        (BICYCLIST_ID, "bicyclist"),
    ]
    .into_iter()
    .map(|(k, v)| (k, v.to_string()))
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneParams {
    pub width: usize,
    pub height: usize,
    pub max_pedestrians: usize,
    pub max_vehicles: usize,
    pub max_buildings: usize,
    pub max_trees: usize,
    pub lane_lines: bool,
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            width: 256,
            height: 128,
            max_pedestrians: 3,
            max_vehicles: 2,
            max_buildings: 4,
            max_trees: 3,
            lane_lines: true,
        }
    }
}

fn fill_rect(m: &mut SemanticLabelMap, x0: usize, y0: usize, w: usize, h: usize, id: u8) {
    for y in y0..(y0 + h).min(m.height) {
        for x in x0..(x0 + w).min(m.width) {
            m.set(x, y, id);
        }
    }
}

fn paint_mask(m: &mut SemanticLabelMap, mask: &Mask, x0: usize, y0: usize) {
    for y in 0..mask.height {
        for x in 0..mask.width {
            let p = mask.get(x, y);
            if p != TRANSPARENT && x0 + x < m.width && y0 + y < m.height {
                m.set(x0 + x, y0 + y, p);
            }
        }
    }
}

/// A road on the left meeting a sidewalk on the right below a horizon, sky
/// above, with buildings, trees, lane markings, vehicles and pedestrians
/// scattered by `seed`.
pub fn synthetic_scene(params: &SceneParams, seed: u64) -> SemanticLabelMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (params.width.max(8), params.height.max(8));
    let mut m = SemanticLabelMap::filled(w, h, SKY_ID, synthetic_palette());

    let horizon = ((h as f64) * rng.gen_range(0.45..0.6)) as usize;
    let edge0 = (w as f64) * rng.gen_range(0.55..0.72);
    let slope = rng.gen_range(0.0..0.4);
    let edge = |y: usize| ((edge0 + slope * (horizon - y) as f64) as usize).min(w - 2);

    for y in 0..horizon {
        let e = edge(y);
        for x in 0..w {
            m.set(x, y, if x < e { ROAD_ID } else { SIDEWALK_ID });
        }
    }

    if params.lane_lines {
        let period = rng.gen_range(8..14);
        for y in 0..horizon.saturating_sub(3) {
            if y % period < period / 2 + 1 {
                let cx = edge(y) / 2;
                fill_rect(&mut m, cx, y, 2, 1, LINE_ID);
            }
        }
    }

    // Keep the sky above the far end of the road edge free, so the ground
    // line has room for an added object.
    let corridor = edge(horizon - 1).saturating_sub(2)..(edge(horizon - 1) + w / 6).min(w);
    let clear = |x0: usize, bw: usize| x0 + bw <= corridor.start || x0 >= corridor.end;

    for _ in 0..rng.gen_range(0..=params.max_buildings) {
        let bw = rng.gen_range(w / 14..w / 5).max(2);
        let bh = rng.gen_range(h / 10..h / 3).max(2);
        let x0 = rng.gen_range(0..w - bw);
        if clear(x0, bw) {
            fill_rect(&mut m, x0, horizon, bw, bh, BUILDING_ID);
        }
    }
    for _ in 0..rng.gen_range(0..=params.max_trees) {
        let th = rng.gen_range(h / 10..h / 4).max(4);
        let tree = synthetic_mask("tree", (th * 2 / 3).max(3), th);
        let x0 = rng.gen_range(0..w - tree.width);
        if clear(x0, tree.width) {
            paint_mask(&mut m, &tree, x0, horizon);
        }
    }

    let ground_top = horizon.saturating_sub(4).max(1);
    for _ in 0..rng.gen_range(0..=params.max_vehicles) {
        let vh = rng.gen_range(h / 12..h / 6).max(3);
        let car = synthetic_mask("vehicle", vh * 2, vh);
        let y0 = rng.gen_range(0..ground_top);
        let right = edge(y0).saturating_sub(car.width).max(1);
        paint_mask(&mut m, &car, rng.gen_range(0..right), y0);
    }
    for _ in 0..rng.gen_range(0..=params.max_pedestrians) {
        let ph = rng.gen_range(h / 10..h / 4).max(4);
        let ped = synthetic_mask("pedestrian", (ph / 3).max(3), ph);
        let y0 = rng.gen_range(0..ground_top);
        let lo = edge(y0);
        if lo + ped.width < w {
            paint_mask(&mut m, &ped, rng.gen_range(lo..w - ped.width), y0);
        }
    }
    m
}

fn element_id(element: &str) -> u8 {
    match element {
        "pedestrian" => PEDESTRIAN_ID,
        "vehicle" => VEHICLE_ID,
        "traffic sign" => TRAFFIC_SIGN_ID,
        "bicyclist" => BICYCLIST_ID,
        "tree" => TREE_ID,
        "building" => BUILDING_ID,
        _ => PEDESTRIAN_ID,
    }
}

/// Silhouette of an element with the given bounding box.
pub fn synthetic_mask(element: &str, width: usize, height: usize) -> Mask {
    let (w, h) = (width.max(1), height.max(1));
    let id = element_id(element);
    let mid = w / 2;
    let inside = |x: usize, y: usize| -> bool {
        let fy = y as f64 / h as f64;
        match element {
            "pedestrian" | "bicyclist" => {
                if fy < 0.45 {
                    w < 3 || x != mid
                } else if fy < 0.8 {
                    true
                } else {
                    x.abs_diff(mid) <= w / 4
                }
            }
            "traffic sign" => fy >= 0.65 || x.abs_diff(mid) <= w / 8,
            "tree" => fy >= 0.35 || x.abs_diff(mid) <= w / 6,
            "vehicle" => fy >= 0.15 || x < w / 4 || x >= w - w / 4,
            _ => true,
        }
    };
    let mut patch = vec![TRANSPARENT; w * h];
    for y in 0..h {
        for x in 0..w {
            if inside(x, y) {
                patch[y * w + x] = id;
            }
        }
    }
    Mask {
        element: element.to_string(),
        width: w,
        height: h,
        patch,
        palette: BTreeMap::from([(id, element.to_string())]),
        source_id: format!("synthetic_{w}x{h}"),
    }
}

/// A few masks per addable element, sized for scenes of `scene_height`.
pub fn synthetic_gallery(scene_height: usize) -> MaskGallery {
    let mut g = MaskGallery::default();
    let u = (scene_height / 16).max(2);
    for (element, sizes) in [
        ("pedestrian", [(u, 3 * u), (u + 1, 3 * u + 2)]),
        ("bicyclist", [(2 * u, 3 * u), (2 * u + 1, 3 * u + 1)]),
        ("traffic sign", [(u + 1, 4 * u), (u + 2, 4 * u + 2)]),
        ("vehicle", [(4 * u, 2 * u), (5 * u, 2 * u + 1)]),
        ("tree", [(2 * u, 4 * u), (3 * u, 5 * u)]),
    ] {
        for (w, h) in sizes {
            g.insert(synthetic_mask(element, w, h));
        }
    }
    g
}

/// Write `n` scenes as `scene_0000.pgm`, ... into `dir`.
pub fn write_synthetic_dataset(
    dir: &Path,
    n: usize,
    params: &SceneParams,
    seed: u64,
) -> Result<Vec<PathBuf>, SceneError> {
    (0..n)
        .map(|i| {
            let path = dir.join(format!("scene_{i:04}.pgm"));
            save_map(&synthetic_scene(params, seed.wrapping_add(i as u64)), &path)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{place_mask_add, ROAD};

    #[test]
    fn scenes_are_deterministic_and_valid() {
        let p = SceneParams::default();
        let a = synthetic_scene(&p, 7);
        assert_eq!(a, synthetic_scene(&p, 7));
        assert_ne!(a, synthetic_scene(&p, 8));
        a.validate().unwrap();
        assert!(a.count(ROAD) > 0 && a.count("sidewalk") > 0);
    }

    #[test]
    fn pedestrians_can_be_placed() {
        let p = SceneParams::default();
        let g = synthetic_gallery(p.height);
        let placed = (0..20)
            .filter(|&s| {
                let m = synthetic_scene(&p, s);
                place_mask_add(&m, &g.masks("pedestrian")[0], "sidewalk", false, 0.15).is_some()
            })
            .count();
        assert_eq!(placed, 20);
    }
}
