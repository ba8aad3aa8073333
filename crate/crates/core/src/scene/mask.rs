//! Object masks cut out of label maps.

use std::collections::{BTreeMap, VecDeque};
use std::path::Path;

use super::map::{load_map, save_map, SemanticLabelMap, TRANSPARENT};
use super::SceneError;

/// A cropped class-id patch. Row 0 is the bottom row; `TRANSPARENT`
/// pixels leave the target untouched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    pub element: String,
    pub width: usize,
    pub height: usize,
    pub patch: Vec<u8>,
    pub palette: BTreeMap<u8, String>,
    pub source_id: String,
}

impl Mask {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.patch[y * self.width + x]
    }

    pub fn opaque_count(&self) -> usize {
        self.patch.iter().filter(|&&p| p != TRANSPARENT).count()
    }

    fn as_map(&self) -> SemanticLabelMap {
        let mut palette = self.palette.clone();
        palette.insert(TRANSPARENT, "transparent".to_string());
        SemanticLabelMap {
            width: self.width,
            height: self.height,
            grid: self.patch.clone(),
            palette,
        }
    }
}

/// Connected component as (pixel indices, min_x, min_y, max_x, max_y).
struct Component {
    pixels: Vec<usize>,
    min_x: usize,
    min_y: usize,
    max_x: usize,
    max_y: usize,
}

fn components(map: &SemanticLabelMap, id: u8) -> Vec<Component> {
    let (w, h) = (map.width, map.height);
    let mut seen = vec![false; map.grid.len()];
    let mut out = Vec::new();
    for start in 0..map.grid.len() {
        if seen[start] || map.grid[start] != id {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut c = Component {
            pixels: Vec::new(),
            min_x: usize::MAX,
            min_y: usize::MAX,
            max_x: 0,
            max_y: 0,
        };
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % w, i / w);
            c.pixels.push(i);
            c.min_x = c.min_x.min(x);
            c.min_y = c.min_y.min(y);
            c.max_x = c.max_x.max(x);
            c.max_y = c.max_y.max(y);
            let mut visit = |j: usize| {
                if !seen[j] && map.grid[j] == id {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        out.push(c);
    }
    out
}

/// Largest 4-connected component of a class, cropped to its bounding box.
/// Ties go to the component whose box is lowest, then leftmost.
pub fn extract_mask(map: &SemanticLabelMap, class_name: &str) -> Result<Option<Mask>, SceneError> {
    let id = map
        .class_id(class_name)
        .ok_or_else(|| SceneError::UnknownClass(class_name.to_string()))?;
    let best = components(map, id).into_iter().min_by(|a, b| {
        b.pixels
            .len()
            .cmp(&a.pixels.len())
            .then(a.min_y.cmp(&b.min_y))
            .then(a.min_x.cmp(&b.min_x))
    });
    Ok(best.map(|c| {
        let (w, h) = (c.max_x - c.min_x + 1, c.max_y - c.min_y + 1);
        let mut patch = vec![TRANSPARENT; w * h];
        for &i in &c.pixels {
            let (x, y) = (i % map.width - c.min_x, i / map.width - c.min_y);
            patch[y * w + x] = id;
        }
        Mask {
            element: class_name.to_lowercase(),
            width: w,
            height: h,
            patch,
            palette: BTreeMap::from([(id, map.palette[&id].clone())]),
            source_id: String::new(),
        }
    }))
}

/// Masks per element, each list ordered by source id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MaskGallery {
    pub entries: BTreeMap<String, Vec<Mask>>,
}

impl MaskGallery {
    pub fn insert(&mut self, mask: Mask) {
        let list = self.entries.entry(mask.element.clone()).or_default();
        let at = list.partition_point(|m| m.source_id <= mask.source_id);
        list.insert(at, mask);
    }

    pub fn masks(&self, element: &str) -> &[Mask] {
        self.entries
            .get(&element.to_lowercase())
            .map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Read every `<element>__<source_id>.pgm` in `dir`.
    pub fn load(dir: &Path) -> Result<Self, SceneError> {
        let mut gallery = Self::default();
        let read = std::fs::read_dir(dir).map_err(|e| SceneError::io(dir, e))?;
        let mut paths: Vec<_> = read
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "pgm"))
            .collect();
        paths.sort();
        for path in paths {
            let stem = path.file_stem().unwrap_or_default().to_string_lossy().to_string();
            let Some((element, source_id)) = stem.split_once("__") else {
                continue;
            };
            let mut map = load_map(&path)?;
            map.palette.remove(&TRANSPARENT);
            if map.grid.iter().all(|&p| p == TRANSPARENT) {
                return Err(SceneError::Format(format!("{}: mask is empty", path.display())));
            }
            gallery.insert(Mask {
                element: element.replace('_', " "),
                width: map.width,
                height: map.height,
                patch: map.grid,
                palette: map.palette,
                source_id: source_id.to_string(),
            });
        }
        Ok(gallery)
    }

    pub fn save(&self, dir: &Path) -> Result<(), SceneError> {
        for mask in self.entries.values().flatten() {
            let name = format!("{}__{}.pgm", mask.element.replace(' ', "_"), mask.source_id);
            save_map(&mask.as_map(), &dir.join(name))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(w: usize, h: usize) -> SemanticLabelMap {
        let palette = [(0, "road"), (7, "pedestrian")]
            .into_iter()
            .map(|(k, v)| (k, v.to_string()))
            .collect();
        SemanticLabelMap::filled(w, h, 0, palette)
    }

    fn blob(m: &mut SemanticLabelMap, x0: usize, y0: usize, w: usize, h: usize) {
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                m.set(x, y, 7);
            }
        }
    }

    #[test]
    fn single_blob_box() {
        let mut m = map(10, 10);
        blob(&mut m, 2, 1, 3, 5);
        let mask = extract_mask(&m, "pedestrian").unwrap().unwrap();
        assert_eq!((mask.width, mask.height, mask.opaque_count()), (3, 5, 15));
    }

    #[test]
    fn largest_component_wins() {
        let mut m = map(12, 12);
        blob(&mut m, 0, 0, 3, 3);
        blob(&mut m, 6, 6, 4, 3);
        let mask = extract_mask(&m, "pedestrian").unwrap().unwrap();
        assert_eq!(mask.opaque_count(), 12);
    }

    #[test]
    fn absent_and_unknown() {
        let m = map(4, 4);
        assert_eq!(extract_mask(&m, "pedestrian").unwrap(), None);
        assert!(matches!(extract_mask(&m, "tree"), Err(SceneError::UnknownClass(_))));
    }

    #[test]
    fn gallery_round_trip() {
        let mut m = map(8, 8);
        blob(&mut m, 1, 1, 2, 4);
        m.set(2, 1, 0);
        let mut g = MaskGallery::default();
        for id in ["b", "a"] {
            let mut mask = extract_mask(&m, "pedestrian").unwrap().unwrap();
            mask.source_id = id.to_string();
            g.insert(mask);
        }
        assert_eq!(g.masks("pedestrian")[0].source_id, "a");
        let dir = tempfile::tempdir().unwrap();
        g.save(dir.path()).unwrap();
        assert_eq!(MaskGallery::load(dir.path()).unwrap(), g);
    }
}
