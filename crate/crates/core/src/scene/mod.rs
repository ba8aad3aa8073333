//! Semantic label maps and the built-in manipulation engine.

mod edit;
mod filter;
mod map;
mod mask;
mod place;
mod synth;

use std::path::Path;

pub use edit::{apply_add, apply_remove, apply_replace};
pub use filter::{filter_add, filter_region, filter_translation, mse, FilterOutcome, FilterReason, Rect};
pub use map::{encode_pgm, load_map, save_map, sidecar_path, SemanticLabelMap, TRANSPARENT};
pub use mask::{extract_mask, Mask, MaskGallery};
pub use place::{place_mask_add, ROAD};
pub use synth::{
    synthetic_gallery, synthetic_mask, synthetic_palette, synthetic_scene, write_synthetic_dataset,
    SceneParams,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SceneError {
    #[error("IoError: {path}: {message}")]
    Io { path: String, message: String },
    #[error("FormatError: {0}")]
    Format(String),
    #[error("PaletteMismatch: class id {0} has no palette entry")]
    PaletteMismatch(u8),
    #[error("UnknownClass: {0:?}")]
    UnknownClass(String),
    #[error("OutOfBounds: {width}x{height} patch at ({x}, {y})")]
    OutOfBounds {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },
}

impl SceneError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        SceneError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}
