//! Where an added mask goes.

use super::map::SemanticLabelMap;
use super::mask::Mask;

pub const ROAD: &str = "road";

/// Column p on row y where road ends: M(p-1, y) = road, M(p, y) != road,
/// and a mask of width `w` still fits.
fn scan_row(map: &SemanticLabelMap, road: u8, y: usize, w: usize) -> Option<usize> {
    let row = map.row(y);
    (1..map.width)
        .take_while(|p| p + w <= map.width)
        .find(|&p| row[p - 1] == road && row[p] != road)
}

fn has_transition(map: &SemanticLabelMap, road: u8, y: usize) -> bool {
    map.row(y).windows(2).any(|w| w[0] == road && w[1] != road)
}

/// Bottom-left corner for an added mask.
///
/// The ground row is the highest row holding a road to non-road transition
/// with room above it for the mask. The first column from the left where
/// the mask's bottom-left pixel sits just past the road edge and the mask
/// fits is returned. With `closer`, the row first moves down by
/// ceil(closer_offset_fraction * height) and is scanned again.
pub fn place_mask_add(
    map: &SemanticLabelMap,
    mask: &Mask,
    reference_class: &str,
    closer: bool,
    closer_offset_fraction: f64,
) -> Option<(usize, usize)> {
    let road = map.class_id(ROAD)?;
    let reference = map.class_id(reference_class)?;
    if !map.grid.contains(&reference) || mask.width == 0 || mask.height > map.height {
        return None;
    }
    let mut y = (0..=map.height - mask.height)
        .rev()
        .find(|&y| has_transition(map, road, y))?;
    if closer {
        let offset = (closer_offset_fraction * map.height as f64).ceil() as usize;
        y = y.checked_sub(offset)?;
    }
    scan_row(map, road, y, mask.width).map(|x| (x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn palette() -> BTreeMap<u8, String> {
        [(0, "road"), (1, "sidewalk"), (2, "sky")]
            .into_iter()
            .map(|(k, v)| (k, v.to_string()))
            .collect()
    }

    fn mask(w: usize, h: usize) -> Mask {
        Mask {
            element: "pedestrian".into(),
            width: w,
            height: h,
            patch: vec![7; w * h],
            palette: BTreeMap::from([(7, "pedestrian".to_string())]),
            source_id: "t".into(),
        }
    }

    fn eight_by_eight() -> SemanticLabelMap {
        let mut m = SemanticLabelMap::filled(8, 8, 2, palette());
        for y in 0..2 {
            for x in 0..8 {
                m.set(x, y, if x < 5 { 0 } else { 1 });
            }
        }
        m
    }

    #[test]
    fn lands_on_the_road_edge() {
        let m = eight_by_eight();
        assert_eq!(place_mask_add(&m, &mask(2, 2), "sidewalk", false, 0.15), Some((5, 1)));
    }

    #[test]
    fn too_wide_or_no_edge() {
        let m = eight_by_eight();
        assert_eq!(place_mask_add(&m, &mask(4, 2), "sidewalk", false, 0.15), None);
        let flat = SemanticLabelMap::filled(8, 8, 0, palette());
        assert_eq!(place_mask_add(&flat, &mask(1, 1), "road", false, 0.15), None);
    }

    #[test]
    fn closer_moves_down() {
        let m = eight_by_eight();
        // ceil(0.15 * 8) = 2 rows below row 1 does not exist.
        assert_eq!(place_mask_add(&m, &mask(2, 2), "sidewalk", true, 0.15), None);
        assert_eq!(place_mask_add(&m, &mask(2, 2), "sidewalk", true, 0.1), Some((5, 0)));
    }

    #[test]
    fn reference_must_be_present() {
        let m = eight_by_eight();
        assert_eq!(place_mask_add(&m, &mask(1, 1), "building", false, 0.15), None);
    }
}
