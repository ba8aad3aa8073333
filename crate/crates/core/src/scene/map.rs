//! Semantic label maps and their PGM + JSON-sidecar file form.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use image::codecs::pnm::{PnmDecoder, PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageDecoder, ImageEncoder};

use super::SceneError;
use crate::util::write_atomic;

/// Id reserved for "no pixel" in mask patches.
pub const TRANSPARENT: u8 = 255;

/// Per-pixel class ids with a palette. Row 0 is the bottom row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticLabelMap {
    pub width: usize,
    pub height: usize,
    pub grid: Vec<u8>,
    pub palette: BTreeMap<u8, String>,
}

impl SemanticLabelMap {
    /// A map filled with `fill`, which must be a palette id.
    pub fn filled(width: usize, height: usize, fill: u8, palette: BTreeMap<u8, String>) -> Self {
        Self {
            width,
            height,
            grid: vec![fill; width * height],
            palette,
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.grid[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, id: u8) {
        self.grid[y * self.width + x] = id;
    }

    pub fn row(&self, y: usize) -> &[u8] {
        &self.grid[y * self.width..(y + 1) * self.width]
    }

    pub fn class_id(&self, name: &str) -> Option<u8> {
        let n = name.to_lowercase();
        self.palette
            .iter()
            .find(|(_, v)| v.to_lowercase() == n)
            .map(|(k, _)| *k)
    }

    pub fn class_name(&self, id: u8) -> Option<&str> {
        self.palette.get(&id).map(String::as_str)
    }

    /// Id for `name`, adding a palette entry when missing.
    pub fn ensure_class(&mut self, name: &str) -> Result<u8, SceneError> {
        if let Some(id) = self.class_id(name) {
            return Ok(id);
        }
        let id = (0..TRANSPARENT)
            .find(|i| !self.palette.contains_key(i))
            .ok_or_else(|| SceneError::Format("palette is full".into()))?;
        self.palette.insert(id, name.to_lowercase());
        Ok(id)
    }

    pub fn count_id(&self, id: u8) -> usize {
        self.grid.iter().filter(|&&p| p == id).count()
    }

    /// Pixel count of a class; zero when the class is not in the palette.
    pub fn count(&self, name: &str) -> usize {
        self.class_id(name).map_or(0, |id| self.count_id(id))
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Check the grid length and that every id has a palette entry.
    pub fn validate(&self) -> Result<(), SceneError> {
        if self.grid.len() != self.width * self.height {
            return Err(SceneError::Format(format!(
                "grid holds {} pixels, expected {}x{}",
                self.grid.len(),
                self.width,
                self.height
            )));
        }
        let mut seen = [false; 256];
        for &p in &self.grid {
            seen[p as usize] = true;
        }
        match (0..=255u8).find(|&id| seen[id as usize] && !self.palette.contains_key(&id)) {
            Some(id) => Err(SceneError::PaletteMismatch(id)),
            None => Ok(()),
        }
    }
}

/// `<path>.json`
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn load_map(path: &Path) -> Result<SemanticLabelMap, SceneError> {
    let reader = BufReader::new(File::open(path).map_err(|e| SceneError::io(path, e))?);
    let decoder = PnmDecoder::new(reader).map_err(|e| SceneError::Format(format!("{}: {e}", path.display())))?;
    let header = decoder.header();
    if !matches!(decoder.subtype(), PnmSubtype::Graymap(SampleEncoding::Binary)) {
        return Err(SceneError::Format(format!("{}: not a binary P5 graymap", path.display())));
    }
    if header.maximal_sample() != 255 {
        return Err(SceneError::Format(format!(
            "{}: maxval {} (expected 255)",
            path.display(),
            header.maximal_sample()
        )));
    }
    let (width, height) = decoder.dimensions();
    let (width, height) = (width as usize, height as usize);
    let mut top_down = vec![0u8; decoder.total_bytes() as usize];
    decoder
        .read_image(&mut top_down)
        .map_err(|e| SceneError::Format(format!("{}: {e}", path.display())))?;

    let mut grid = Vec::with_capacity(width * height);
    for row in top_down.chunks(width.max(1)).rev() {
        grid.extend_from_slice(row);
    }

    let side = sidecar_path(path);
    let text = std::fs::read_to_string(&side).map_err(|e| SceneError::io(&side, e))?;
    let raw: BTreeMap<String, String> = serde_json::from_str(&text)
        .map_err(|e| SceneError::Format(format!("{}: {e}", side.display())))?;
    let mut palette = BTreeMap::new();
    for (k, v) in raw {
        let id: u8 = k
            .trim()
            .parse()
            .map_err(|_| SceneError::Format(format!("{}: bad class id {k:?}", side.display())))?;
        palette.insert(id, v);
    }

    let map = SemanticLabelMap {
        width,
        height,
        grid,
        palette,
    };
    map.validate()?;
    Ok(map)
}

/// Encode a map as P5 bytes (top row first).
pub fn encode_pgm(map: &SemanticLabelMap) -> Result<Vec<u8>, SceneError> {
    let mut top_down = Vec::with_capacity(map.grid.len());
    for y in (0..map.height).rev() {
        top_down.extend_from_slice(map.row(y));
    }
    let mut bytes = Vec::new();
    PnmEncoder::new(&mut bytes)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(&top_down, map.width as u32, map.height as u32, ExtendedColorType::L8)
        .map_err(|e| SceneError::Format(e.to_string()))?;
    Ok(bytes)
}

pub fn save_map(map: &SemanticLabelMap, path: &Path) -> Result<(), SceneError> {
    map.validate()?;
    let bytes = encode_pgm(map)?;
    write_atomic(path, &bytes).map_err(|e| SceneError::io(path, e))?;
    let palette: BTreeMap<String, &String> =
        map.palette.iter().map(|(k, v)| (k.to_string(), v)).collect();
    let mut json = serde_json::to_vec_pretty(&palette).expect("palette serializes");
    json.write_all(b"\n").expect("in-memory write");
    let side = sidecar_path(path);
    write_atomic(&side, &json).map_err(|e| SceneError::io(&side, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn palette() -> BTreeMap<u8, String> {
        [(0, "road"), (1, "sidewalk"), (7, "pedestrian")]
            .into_iter()
            .map(|(k, v)| (k, v.to_string()))
            .collect()
    }

    #[test]
    fn round_trip_keeps_orientation() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = SemanticLabelMap::filled(5, 3, 0, palette());
        m.set(4, 0, 7);
        m.set(0, 2, 1);
        let p = dir.path().join("a.pgm");
        save_map(&m, &p).unwrap();
        assert_eq!(load_map(&p).unwrap(), m);
        // First stored row is the top of the scene.
        let bytes = std::fs::read(&p).unwrap();
        let pixels = &bytes[bytes.len() - 15..];
        assert_eq!(pixels[0], 1);
        assert_eq!(pixels[14], 7);
    }

    #[test]
    fn sixteen_bit_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.pgm");
        let mut bytes = b"P5\n2 1\n65535\n".to_vec();
        bytes.extend_from_slice(&[0, 0, 0, 1]);
        std::fs::write(&p, bytes).unwrap();
        std::fs::write(sidecar_path(&p), r#"{"0":"road","1":"sidewalk"}"#).unwrap();
        assert!(matches!(load_map(&p), Err(SceneError::Format(_))));
    }

    #[test]
    fn unknown_id_is_palette_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.pgm");
        std::fs::write(&p, b"P5\n2 1\n255\n\x00\x07").unwrap();
        std::fs::write(sidecar_path(&p), r#"{"0":"road"}"#).unwrap();
        assert_eq!(load_map(&p), Err(SceneError::PaletteMismatch(7)));
    }
}
