//! Multi-resolution feature tables.
//!
//! Level `k` holds every polygon at curve order `base - k`: each level's
//! intervals are the downscaled intervals of the level below, and a polygon
//! whose downscaled cover falls under the drop threshold is left out of that
//! level and all coarser ones.

use crate::codec::{downscale, HilbertPolygon, Rect};
use crate::error::{Error, Result};
use crate::hilbert::CurveOrder;
use crate::index::{build_table, FeatureTable, QueryResult};

pub const DEFAULT_DROP_THRESHOLD: u64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct FeaturePyramid {
    base_order: CurveOrder,
    drop_threshold: u64,
    levels: Vec<FeatureTable>,
}

impl FeaturePyramid {
    /// Assembles a pyramid from precomputed levels, checking the level
    /// structure (orders step down by one, ids only ever disappear).
    pub fn from_levels(drop_threshold: u64, levels: Vec<FeatureTable>) -> Result<Self> {
        let base = levels.first().ok_or_else(|| Error::Validation("pyramid has no levels".into()))?;
        let base_order = base.order();
        for (k, pair) in levels.windows(2).enumerate() {
            let (fine, coarse) = (&pair[0], &pair[1]);
            if coarse.order().get() + 1 != fine.order().get() {
                return Err(Error::Validation(format!(
                    "level {} has order {}, expected {}",
                    k + 1,
                    coarse.order(),
                    fine.order().get() - 1
                )));
            }
            if let Some(id) = coarse.polygon_ids().find(|&id| !fine.contains(id)) {
                return Err(Error::Validation(format!("polygon {id} appears at level {} but not at level {k}", k + 1)));
            }
        }
        Ok(FeaturePyramid { base_order, drop_threshold, levels })
    }

    pub fn base_order(&self) -> CurveOrder {
        self.base_order
    }

    pub fn min_order(&self) -> CurveOrder {
        self.levels.last().unwrap().order()
    }

    pub fn drop_threshold(&self) -> u64 {
        self.drop_threshold
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[FeatureTable] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> Option<&FeatureTable> {
        self.levels.get(k)
    }

    pub fn base(&self) -> &FeatureTable {
        &self.levels[0]
    }

    /// Coarsest level whose cells are still no larger than one output pixel
    /// in either direction: the largest `k` with `2^k * out <= region` on both
    /// axes, clamped to the available levels.
    pub fn select_level(&self, region: &Rect, out_w: u64, out_h: u64) -> Result<usize> {
        select_level(region, out_w, out_h, self.max_level())
    }

    /// Polygons touching `region` (base-level cells) at level `k`.
    pub fn query(&self, region: &Rect, k: usize) -> Result<QueryResult> {
        let table = self
            .level(k)
            .ok_or_else(|| Error::domain(format!("level {k} beyond the {} available", self.level_count())))?;
        match region_at_level(region, k).and_then(|r| r.clip(table.order())) {
            Some(rect) => table.query_rect(&rect),
            None => Ok(QueryResult::default()),
        }
    }
}

/// Level selection shared with image pyramids.
pub fn select_level(region: &Rect, out_w: u64, out_h: u64, max_level: usize) -> Result<usize> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::domain(format!("output size {out_w}x{out_h} is empty")));
    }
    let (w, h) = (region.width(), region.height());
    let mut k = 0usize;
    while k < max_level && k < 62 && (out_w << (k + 1)) <= w && (out_h << (k + 1)) <= h {
        k += 1;
    }
    Ok(k)
}

/// Cells of level `k` covering the base-level `region`: minimum corner
/// floored, maximum corner taken as `ceil((max + 1) / 2^k) - 1`.
pub fn region_at_level(region: &Rect, k: usize) -> Option<Rect> {
    if k >= 64 {
        return None;
    }
    Some(Rect {
        min_x: region.min_x >> k,
        min_y: region.min_y >> k,
        max_x: region.max_x >> k,
        max_y: region.max_y >> k,
    })
}

/// Builds every level from `base` polygons down to `min_order`.
pub fn build_pyramid(
    base_order: CurveOrder,
    base: Vec<HilbertPolygon>,
    min_order: u8,
    drop_threshold: u64,
) -> Result<FeaturePyramid> {
    if min_order < 1 || min_order > base_order.get() {
        return Err(Error::Validation(format!("min order {min_order} must lie in 1..={base_order}")));
    }
    let mut levels = Vec::with_capacity((base_order.get() - min_order + 1) as usize);
    levels.push(build_table(base_order, base.iter().cloned())?);
    let mut current = base;
    let mut order = base_order;
    while order.get() > min_order {
        order = order.coarser().expect("order above min_order >= 1");
        current = current
            .into_iter()
            .map(|p| -> Result<Option<HilbertPolygon>> {
                let intervals = downscale(&p.intervals)?;
                Ok((intervals.cell_count() >= drop_threshold).then_some(HilbertPolygon { intervals, ..p }))
            })
            .filter_map(Result::transpose)
            .collect::<Result<_>>()?;
        levels.push(build_table(order, current.iter().cloned())?);
    }
    FeaturePyramid::from_levels(drop_threshold, levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{normalize, IntervalSet};
    use crate::hilbert::{xy_to_index, Cell};

    fn order(n: u8) -> CurveOrder {
        CurveOrder::new(n).unwrap()
    }

    fn unit_cell(o: CurveOrder, id: u64, c: Cell) -> HilbertPolygon {
        let h = xy_to_index(o, c).unwrap();
        HilbertPolygon::new(id, "c", 1.0, normalize(o, [(h, h)]).unwrap()).unwrap()
    }

    #[test]
    fn unit_cell_survives_with_threshold_one() {
        let o = order(5);
        let p = build_pyramid(o, vec![unit_cell(o, 1, Cell::new(9, 17))], 1, 1).unwrap();
        assert_eq!(p.level_count(), 5);
        for (k, t) in p.levels().iter().enumerate() {
            assert!(t.contains(1), "level {k}");
            assert_eq!(t.order().get(), 5 - k as u8);
        }
        let coarsest = p.levels().last().unwrap().intervals(1).unwrap();
        assert_eq!(coarsest.cells().collect::<Vec<_>>(), vec![Cell::new(0, 1)]);
    }

    #[test]
    fn unit_cell_dropped_with_threshold_two() {
        let o = order(4);
        let p = build_pyramid(o, vec![unit_cell(o, 1, Cell::new(3, 3))], 2, 2).unwrap();
        assert!(p.level(0).unwrap().contains(1));
        assert!(!p.level(1).unwrap().contains(1));
        assert!(!p.level(2).unwrap().contains(1));
    }

    #[test]
    fn bad_min_order() {
        assert!(build_pyramid(order(3), vec![], 4, 1).is_err());
        assert!(build_pyramid(order(3), vec![], 0, 1).is_err());
        assert_eq!(build_pyramid(order(3), vec![], 3, 1).unwrap().level_count(), 1);
    }

    #[test]
    fn level_selection() {
        let p = build_pyramid(order(17), vec![], 1, 1).unwrap();
        let r = |w, h| Rect::from_region(25_000, 25_000, w, h).unwrap();
        assert_eq!(p.select_level(&r(512, 512), 512, 512).unwrap(), 0);
        assert_eq!(p.select_level(&r(10_000, 10_000), 512, 512).unwrap(), 4);
        assert_eq!(p.select_level(&r(256, 256), 512, 512).unwrap(), 0);
        assert_eq!(p.select_level(&r(1024, 1023), 512, 512).unwrap(), 0);
        assert_eq!(p.select_level(&r(1024, 1024), 512, 512).unwrap(), 1);
        assert!(p.select_level(&r(10, 10), 0, 10).is_err());
        let small = build_pyramid(order(3), vec![], 2, 1).unwrap();
        assert_eq!(small.select_level(&Rect::from_region(0, 0, 8, 8).unwrap(), 1, 1).unwrap(), 1);
    }

    #[test]
    fn select_level_is_monotone_in_output_size() {
        let region = Rect::from_region(0, 0, 3000, 2000).unwrap();
        let mut last = 0;
        for out in (1..=4000).rev() {
            let k = select_level(&region, out, out, 20).unwrap();
            assert!(k >= last);
            last = k;
        }
    }

    #[test]
    fn region_mapping_covers_pixels() {
        let r = Rect::from_region(5, 6, 4, 3).unwrap();
        assert_eq!(region_at_level(&r, 1).unwrap(), Rect::new(2, 3, 4, 4).unwrap());
        assert_eq!(region_at_level(&r, 0).unwrap(), r);
    }

    #[test]
    fn query_at_levels() {
        let o = order(4);
        let a = unit_cell(o, 1, Cell::new(0, 0));
        let b = HilbertPolygon::new(2, "c", 0.5, IntervalSet::full(o)).unwrap();
        let p = build_pyramid(o, vec![a, b], 1, 1).unwrap();
        let far = Rect::from_region(8, 8, 8, 8).unwrap();
        assert_eq!(p.query(&far, 0).unwrap().ids, vec![2]);
        assert_eq!(p.query(&far, 3).unwrap().ids, vec![2]);
        let near = Rect::from_region(1, 1, 1, 1).unwrap();
        assert_eq!(p.query(&near, 0).unwrap().ids, vec![2]);
        assert_eq!(p.query(&near, 1).unwrap().ids, vec![1, 2]);
        let off_grid = Rect::from_region(40, 40, 4, 4).unwrap();
        assert!(p.query(&off_grid, 0).unwrap().is_empty());
        assert!(p.query(&near, 4).is_err());
    }

    #[test]
    fn from_levels_validation() {
        let o = order(3);
        let t3 = build_table(o, [unit_cell(o, 1, Cell::new(0, 0))]).unwrap();
        let t2 = build_table(order(2), [unit_cell(order(2), 2, Cell::new(0, 0))]).unwrap();
        assert!(FeaturePyramid::from_levels(1, vec![t3.clone(), t2]).is_err());
        assert!(FeaturePyramid::from_levels(1, vec![t3.clone(), t3]).is_err());
        assert!(FeaturePyramid::from_levels(1, vec![]).is_err());
    }
}
