//! Hilbert interval encoding of cell sets.
//!
//! A region is stored as the sorted, merged list of inclusive curve ranges
//! covering exactly its cells. Range boundaries are found by looking only at
//! boundary cells: position `h` opens a run iff its cell is covered and the
//! cell at `h - 1` is not, and since consecutive curve cells are 4-neighbours
//! such an `h` always sits on the region's edge.

use crate::error::{Error, Result};
use crate::geometry::{mask_to_polygon, polygon_to_mask, CellMask, VertexPolygon};
use crate::hilbert::{d2xy, parent_index, xy2d, Cell, CurveOrder, HilbertIndex};
use crate::scalar::Scalar;

/// Inclusive curve range.
pub type Span = (HilbertIndex, HilbertIndex);

/// Sorted, non-overlapping, non-adjacent inclusive ranges at one curve order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalSet {
    order: CurveOrder,
    ranges: Vec<Span>,
}

impl IntervalSet {
    pub fn empty(order: CurveOrder) -> Self {
        IntervalSet { order, ranges: Vec::new() }
    }

    /// The single range covering the whole grid.
    pub fn full(order: CurveOrder) -> Self {
        IntervalSet { order, ranges: vec![(0, order.last_index())] }
    }

    /// Wraps ranges that are already normalized. Checked in debug builds.
    pub(crate) fn from_sorted_unchecked(order: CurveOrder, ranges: Vec<Span>) -> Self {
        debug_assert!(ranges.iter().all(|&(lo, hi)| lo <= hi && hi <= order.last_index()));
        debug_assert!(ranges.windows(2).all(|w| w[0].1 + 1 < w[1].0));
        IntervalSet { order, ranges }
    }

    #[inline]
    pub fn order(&self) -> CurveOrder {
        self.order
    }

    #[inline]
    pub fn ranges(&self) -> &[Span] {
        &self.ranges
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// Number of covered cells.
    pub fn cell_count(&self) -> u64 {
        self.ranges.iter().map(|&(lo, hi)| hi - lo + 1).sum()
    }

    pub fn contains(&self, h: HilbertIndex) -> bool {
        let i = self.ranges.partition_point(|&(_, hi)| hi < h);
        self.ranges.get(i).is_some_and(|&(lo, _)| lo <= h)
    }

    /// Covered cells in curve order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let order = self.order;
        self.ranges.iter().flat_map(move |&(lo, hi)| (lo..=hi).map(move |h| d2xy(order, h)))
    }

    pub fn intersection(&self, other: &IntervalSet) -> Result<IntervalSet> {
        check_order(self.order, other.order)?;
        let (a, b) = (&self.ranges, &other.ranges);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Ok(IntervalSet::from_sorted_unchecked(self.order, out))
    }

    pub fn intersects(&self, other: &IntervalSet) -> bool {
        let (a, b) = (&self.ranges, &other.ranges);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i].0.max(b[j].0) <= a[i].1.min(b[j].1) {
                return true;
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        false
    }
}

pub(crate) fn check_order(expected: CurveOrder, found: CurveOrder) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::OrderMismatch { expected: expected.get(), found: found.get() })
    }
}

/// Sorts and merges overlapping or adjacent ranges.
pub fn normalize(order: CurveOrder, ranges: impl IntoIterator<Item = Span>) -> Result<IntervalSet> {
    let mut ranges: Vec<Span> = ranges.into_iter().collect();
    for &(lo, hi) in &ranges {
        if lo > hi {
            return Err(Error::domain(format!("range [{lo}, {hi}] has lo > hi")));
        }
        if hi > order.last_index() {
            return Err(Error::domain(format!("range [{lo}, {hi}] past the end of an order-{order} curve")));
        }
    }
    ranges.sort_unstable();
    let mut out: Vec<Span> = Vec::with_capacity(ranges.len());
    for (lo, hi) in ranges {
        match out.last_mut() {
            Some(last) if lo <= last.1.saturating_add(1) => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    Ok(IntervalSet { order, ranges: out })
}

/// Pairs sorted run starts with sorted run ends.
fn pair_runs(order: CurveOrder, mut starts: Vec<HilbertIndex>, mut ends: Vec<HilbertIndex>) -> IntervalSet {
    starts.sort_unstable();
    ends.sort_unstable();
    debug_assert_eq!(starts.len(), ends.len());
    IntervalSet::from_sorted_unchecked(order, starts.into_iter().zip(ends).collect())
}

/// Exact interval cover of a mask, examining boundary cells only.
pub fn mask_to_intervals(mask: &CellMask) -> IntervalSet {
    let order = mask.order();
    let last = order.last_index();
    let mut starts = Vec::new();
    let mut ends = Vec::new();
    for cell in mask.boundary_cells() {
        let h = xy2d(order, cell);
        if h == 0 || !mask.contains(d2xy(order, h - 1)) {
            starts.push(h);
        }
        if h == last || !mask.contains(d2xy(order, h + 1)) {
            ends.push(h);
        }
    }
    pair_runs(order, starts, ends)
}

/// Axis-aligned cell rectangle with inclusive bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rect {
    pub min_x: u64,
    pub min_y: u64,
    pub max_x: u64,
    pub max_y: u64,
}

impl Rect {
    pub fn new(min_x: u64, min_y: u64, max_x: u64, max_y: u64) -> Result<Self> {
        if min_x > max_x || min_y > max_y {
            return Err(Error::domain(format!("degenerate rectangle ({min_x},{min_y})..=({max_x},{max_y})")));
        }
        Ok(Rect { min_x, min_y, max_x, max_y })
    }

    /// Rectangle from an origin and a size in cells.
    pub fn from_region(x: u64, y: u64, w: u64, h: u64) -> Result<Self> {
        if w == 0 || h == 0 {
            return Err(Error::domain(format!("empty region {w}x{h}")));
        }
        Rect::new(x, y, x + w - 1, y + h - 1)
    }

    pub fn width(&self) -> u64 {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> u64 {
        self.max_y - self.min_y + 1
    }

    #[inline]
    pub fn contains(&self, c: Cell) -> bool {
        c.x >= self.min_x && c.x <= self.max_x && c.y >= self.min_y && c.y <= self.max_y
    }

    pub fn fits(&self, order: CurveOrder) -> bool {
        self.max_x < order.side() && self.max_y < order.side()
    }

    /// Clips to the grid of `order`; `None` when nothing is left.
    pub fn clip(&self, order: CurveOrder) -> Option<Rect> {
        let last = order.side() - 1;
        (self.min_x <= last && self.min_y <= last).then(|| Rect {
            min_x: self.min_x,
            min_y: self.min_y,
            max_x: self.max_x.min(last),
            max_y: self.max_y.min(last),
        })
    }

    /// The cells of the perimeter ring, each once.
    pub fn perimeter(&self) -> impl Iterator<Item = Cell> + '_ {
        let top = (self.min_x..=self.max_x).map(move |x| Cell::new(x, self.min_y));
        let bottom = (self.max_y != self.min_y)
            .then(|| (self.min_x..=self.max_x).map(move |x| Cell::new(x, self.max_y)))
            .into_iter()
            .flatten();
        let inner_rows = self.min_y + 1..self.max_y;
        let left = inner_rows.clone().map(move |y| Cell::new(self.min_x, y));
        let right = (self.max_x != self.min_x)
            .then(move || inner_rows.map(move |y| Cell::new(self.max_x, y)))
            .into_iter()
            .flatten();
        top.chain(bottom).chain(left).chain(right)
    }
}

/// Exact interval cover of a rectangle, also returning how many cells were
/// evaluated. Only perimeter cells are evaluated.
pub fn rect_to_intervals_counted(rect: &Rect, order: CurveOrder) -> Result<(IntervalSet, usize)> {
    if !rect.fits(order) {
        return Err(Error::domain(format!("rectangle {rect:?} outside the order-{order} grid")));
    }
    let last = order.last_index();
    let mut starts = Vec::new();
    let mut ends = Vec::new();
    let mut evaluated = 0usize;
    for cell in rect.perimeter() {
        evaluated += 1;
        let h = xy2d(order, cell);
        if h == 0 || !rect.contains(d2xy(order, h - 1)) {
            starts.push(h);
        }
        if h == last || !rect.contains(d2xy(order, h + 1)) {
            ends.push(h);
        }
    }
    Ok((pair_runs(order, starts, ends), evaluated))
}

pub fn rect_to_intervals(rect: &Rect, order: CurveOrder) -> Result<IntervalSet> {
    rect_to_intervals_counted(rect, order).map(|(set, _)| set)
}

/// Expands intervals into a mask. Cost is linear in the covered cell count.
pub fn intervals_to_mask(intervals: &IntervalSet) -> CellMask {
    CellMask::from_cells(intervals.order(), intervals.cells()).expect("interval cells lie on the grid")
}

/// Maps every range onto the next coarser order; covered cells of the result
/// are exactly the parents of the covered cells of the input.
pub fn downscale(intervals: &IntervalSet) -> Result<IntervalSet> {
    let coarser =
        intervals.order().coarser().ok_or_else(|| Error::domain("cannot downscale an order-1 interval set"))?;
    let mut out: Vec<Span> = Vec::with_capacity(intervals.len());
    for &(lo, hi) in intervals.ranges() {
        let (plo, phi) = (parent_index(lo), parent_index(hi));
        match out.last_mut() {
            Some(last) if plo <= last.1 + 1 => last.1 = last.1.max(phi),
            _ => out.push((plo, phi)),
        }
    }
    Ok(IntervalSet::from_sorted_unchecked(coarser, out))
}

/// A region of interest in Hilbert form with its classification.
#[derive(Clone, Debug, PartialEq)]
pub struct HilbertPolygon {
    pub id: u64,
    /// Class concept URI, e.g. `http://snomed.info/id/4421005`.
    pub class_code: String,
    pub certainty: f64,
    pub intervals: IntervalSet,
}

impl HilbertPolygon {
    pub fn new(id: u64, class_code: impl Into<String>, certainty: f64, intervals: IntervalSet) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::EmptyGeometry(intervals.order().get()));
        }
        if !(0.0..=1.0).contains(&certainty) {
            return Err(Error::domain(format!("certainty {certainty} outside [0, 1]")));
        }
        Ok(HilbertPolygon { id, class_code: class_code.into(), certainty, intervals })
    }

    pub fn order(&self) -> CurveOrder {
        self.intervals.order()
    }
}

/// Rasterizes and encodes a vertex polygon.
pub fn polygon_to_hilbert<T: Scalar>(
    polygon: &VertexPolygon<T>,
    order: CurveOrder,
    id: u64,
    class_code: impl Into<String>,
    certainty: f64,
) -> Result<HilbertPolygon> {
    let mask = polygon_to_mask(polygon, order)?;
    if mask.is_empty() {
        return Err(Error::EmptyGeometry(order.get()));
    }
    HilbertPolygon::new(id, class_code, certainty, mask_to_intervals(&mask))
}

/// Cartesian outlines of a Hilbert polygon, one per connected component, with
/// vertices on cell corners of its curve order.
pub fn hilbert_to_polygon<T: Scalar>(polygon: &HilbertPolygon) -> Vec<VertexPolygon<T>> {
    mask_to_polygon(&intervals_to_mask(&polygon.intervals))
}
