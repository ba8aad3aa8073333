//! Validity filters for generated cases.

use std::fmt;

use serde::Serialize;

use super::map::SemanticLabelMap;

/// Why a case produced no follow-up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterReason {
    Occupied,
    TooSmall,
    AlreadyInDomain,
    NoPosition,
    NoMask,
    UnsupportedPosition,
    UnsupportedComparative,
    EngineDeclined,
}

impl FilterReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterReason::Occupied => "occupied",
            FilterReason::TooSmall => "too_small",
            FilterReason::AlreadyInDomain => "already_in_domain",
            FilterReason::NoPosition => "no_position",
            FilterReason::NoMask => "no_mask",
            FilterReason::UnsupportedPosition => "unsupported_position",
            FilterReason::UnsupportedComparative => "unsupported_comparative",
            FilterReason::EngineDeclined => "engine_declined",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            FilterReason::Occupied,
            FilterReason::TooSmall,
            FilterReason::AlreadyInDomain,
            FilterReason::NoPosition,
            FilterReason::NoMask,
            FilterReason::UnsupportedPosition,
            FilterReason::UnsupportedComparative,
            FilterReason::EngineDeclined,
        ]
        .into_iter()
        .find(|r| r.as_str() == s)
    }
}

impl fmt::Display for FilterReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterOutcome {
    Pass,
    Filtered(FilterReason),
}

impl FilterOutcome {
    pub fn passed(self) -> bool {
        self == FilterOutcome::Pass
    }
}

/// Axis-aligned rectangle with its bottom-left corner at (x, y).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

const FREE_CLASSES: &[&str] = &["road", "sidewalk", "sky"];

/// Pass iff every pixel under `rect` is road, sidewalk or sky.
pub fn filter_add(map: &SemanticLabelMap, rect: Rect) -> FilterOutcome {
    let mut free = [false; 256];
    for name in FREE_CLASSES {
        if let Some(id) = map.class_id(name) {
            free[id as usize] = true;
        }
    }
    let inside = rect.x + rect.width <= map.width && rect.y + rect.height <= map.height;
    let clear = inside
        && (rect.y..rect.y + rect.height)
            .all(|y| map.row(y)[rect.x..rect.x + rect.width].iter().all(|&p| free[p as usize]));
    if clear {
        FilterOutcome::Pass
    } else {
        FilterOutcome::Filtered(FilterReason::Occupied)
    }
}

/// Pass iff the class covers at least `min_fraction` of the map.
pub fn filter_region(map: &SemanticLabelMap, class: &str, min_fraction: f64) -> FilterOutcome {
    let fraction = map.count(class) as f64 / map.len().max(1) as f64;
    if fraction >= min_fraction && fraction > 0.0 {
        FilterOutcome::Pass
    } else {
        FilterOutcome::Filtered(FilterReason::TooSmall)
    }
}

/// Mean squared error between two 0-255 intensity buffers.
pub fn mse(a: &[u8], b: &[u8]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let sum: f64 = a
        .iter()
        .zip(b)
        .map(|(&p, &q)| {
            let d = p as f64 - q as f64;
            d * d
        })
        .sum();
    sum / a.len() as f64
}

/// Pass iff the generated image differs from the original by at least
/// `mse_min`. Buffers of different sizes always pass.
pub fn filter_translation(original: &[u8], generated: &[u8], mse_min: f64) -> FilterOutcome {
    if original.len() != generated.len() || mse(original, generated) >= mse_min {
        FilterOutcome::Pass
    } else {
        FilterOutcome::Filtered(FilterReason::AlreadyInDomain)
    }
}
