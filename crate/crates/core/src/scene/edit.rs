//! Label-map edits for add, remove and replace.

use super::map::{SemanticLabelMap, TRANSPARENT};
use super::mask::Mask;
use super::place::ROAD;
use super::SceneError;

/// Paint the opaque pixels of `mask` with its bottom-left corner at `pos`.
/// Mask ids are carried over by class name.
pub fn apply_add(
    map: &SemanticLabelMap,
    mask: &Mask,
    pos: (usize, usize),
) -> Result<SemanticLabelMap, SceneError> {
    let (x0, y0) = pos;
    if x0 + mask.width > map.width || y0 + mask.height > map.height {
        return Err(SceneError::OutOfBounds {
            x: x0,
            y: y0,
            width: mask.width,
            height: mask.height,
        });
    }
    let mut out = map.clone();
    let mut remap = [TRANSPARENT; 256];
    for (&id, name) in &mask.palette {
        if id != TRANSPARENT {
            remap[id as usize] = out.ensure_class(name)?;
        }
    }
    for y in 0..mask.height {
        for x in 0..mask.width {
            let p = mask.get(x, y);
            if p == TRANSPARENT {
                continue;
            }
            if remap[p as usize] == TRANSPARENT && !mask.palette.contains_key(&p) {
                return Err(SceneError::PaletteMismatch(p));
            }
            out.set(x0 + x, y0 + y, remap[p as usize]);
        }
    }
    Ok(out)
}

/// Relabel every pixel of `target_class` as `new_class`.
pub fn apply_replace(
    map: &SemanticLabelMap,
    target_class: &str,
    new_class: &str,
) -> Result<SemanticLabelMap, SceneError> {
    let from = map
        .class_id(target_class)
        .ok_or_else(|| SceneError::UnknownClass(target_class.to_string()))?;
    if map.count_id(from) == 0 {
        return Err(SceneError::UnknownClass(target_class.to_string()));
    }
    let mut out = map.clone();
    let to = out.ensure_class(new_class)?;
    for p in out.grid.iter_mut() {
        if *p == from {
            *p = to;
        }
    }
    Ok(out)
}

/// Relabel every pixel of `target_class` as road.
pub fn apply_remove(map: &SemanticLabelMap, target_class: &str) -> Result<SemanticLabelMap, SceneError> {
    apply_replace(map, target_class, ROAD)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn map() -> SemanticLabelMap {
        let palette = [(0, "road"), (3, "line"), (4, "building")]
            .into_iter()
            .map(|(k, v)| (k, v.to_string()))
            .collect();
        let mut m = SemanticLabelMap::filled(10, 10, 0, palette);
        for y in 0..4 {
            for x in 0..10 {
                m.set(x, y, 3);
            }
        }
        m.set(0, 9, 4);
        m
    }

    #[test]
    fn remove_conserves_pixels() {
        let m = map();
        let out = apply_remove(&m, "line").unwrap();
        assert_eq!(out.count("line"), 0);
        assert_eq!(out.count("road"), m.count("road") + 40);
    }

    #[test]
    fn replace_adds_class() {
        let m = map();
        let out = apply_replace(&m, "building", "tree").unwrap();
        assert_eq!(out.count("building"), 0);
        assert_eq!(out.count("tree"), 1);
        assert!(matches!(apply_remove(&m, "pedestrian"), Err(SceneError::UnknownClass(_))));
    }

    #[test]
    fn add_paints_opaque_pixels() {
        let m = map();
        let mask = Mask {
            element: "pedestrian".into(),
            width: 2,
            height: 3,
            patch: vec![9, TRANSPARENT, 9, 9, 9, 9],
            palette: BTreeMap::from([(9, "pedestrian".to_string())]),
            source_id: "s".into(),
        };
        let out = apply_add(&m, &mask, (8, 7)).unwrap();
        assert_eq!(out.count("pedestrian"), mask.opaque_count());
        assert_eq!(out.count("road"), m.count("road") - 5);
        assert!(matches!(apply_add(&m, &mask, (9, 7)), Err(SceneError::OutOfBounds { .. })));
    }
}
