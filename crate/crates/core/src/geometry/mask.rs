//! Cell masks: rasterization of vertex polygons and boundary tracing back.

use std::collections::VecDeque;

use super::polygon::{Point, Ring, VertexPolygon};
use crate::error::{Error, Result};
use crate::hilbert::{Cell, CurveOrder};
use crate::scalar::Scalar;

/// Set of covered cells on an order-`n` grid.
///
/// Storage is a dense bitset over a bounding window of the grid, so a small
/// polygon on a huge grid stays small. Cells outside the window are uncovered.
#[derive(Clone, Debug)]
pub struct CellMask {
    order: CurveOrder,
    origin: Cell,
    width: u64,
    height: u64,
    bits: Vec<u64>,
}

impl PartialEq for CellMask {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.iter().eq(other.iter())
    }
}

impl Eq for CellMask {}

impl CellMask {
    /// Empty mask whose window spans the inclusive cell range `min..=max`.
    pub fn with_window(order: CurveOrder, min: Cell, max: Cell) -> Result<Self> {
        if !order.contains(max) || min.x > max.x || min.y > max.y {
            return Err(Error::domain(format!(
                "mask window ({},{})..=({},{}) invalid for order {order}",
                min.x, min.y, max.x, max.y
            )));
        }
        let width = max.x - min.x + 1;
        let height = max.y - min.y + 1;
        let words = (width * height).div_ceil(64) as usize;
        Ok(CellMask { order, origin: min, width, height, bits: vec![0; words] })
    }

    /// Empty mask with an empty window.
    pub fn empty(order: CurveOrder) -> Self {
        CellMask { order, origin: Cell::default(), width: 0, height: 0, bits: Vec::new() }
    }

    /// Mask over the whole grid.
    pub fn full_grid(order: CurveOrder) -> Self {
        let max = Cell::new(order.side() - 1, order.side() - 1);
        let mut m = Self::with_window(order, Cell::default(), max).unwrap();
        for y in 0..order.side() {
            m.fill_row(y, 0, order.side());
        }
        m
    }

    pub fn from_cells(order: CurveOrder, cells: impl IntoIterator<Item = Cell>) -> Result<Self> {
        let cells: Vec<Cell> = cells.into_iter().collect();
        if cells.is_empty() {
            return Ok(Self::empty(order));
        }
        let mut min = cells[0];
        let mut max = cells[0];
        for c in &cells {
            min = Cell::new(min.x.min(c.x), min.y.min(c.y));
            max = Cell::new(max.x.max(c.x), max.y.max(c.y));
        }
        let mut m = Self::with_window(order, min, max)?;
        for c in cells {
            m.insert(c);
        }
        Ok(m)
    }

    #[inline]
    pub fn order(&self) -> CurveOrder {
        self.order
    }

    /// Inclusive `(min, max)` corners of the storage window, if non-empty.
    pub fn window(&self) -> Option<(Cell, Cell)> {
        (self.width > 0)
            .then(|| (self.origin, Cell::new(self.origin.x + self.width - 1, self.origin.y + self.height - 1)))
    }

    #[inline]
    fn slot(&self, c: Cell) -> Option<usize> {
        let dx = c.x.checked_sub(self.origin.x)?;
        let dy = c.y.checked_sub(self.origin.y)?;
        (dx < self.width && dy < self.height).then(|| (dy * self.width + dx) as usize)
    }

    #[inline]
    pub fn contains(&self, c: Cell) -> bool {
        self.slot(c).is_some_and(|i| self.bits[i / 64] >> (i % 64) & 1 == 1)
    }

    /// Marks `c` covered. Panics when `c` is outside the window.
    #[inline]
    pub fn insert(&mut self, c: Cell) {
        let i = self.slot(c).expect("cell outside mask window");
        self.bits[i / 64] |= 1 << (i % 64);
    }

    /// Covers cells `x0..x1` of row `y` (window coordinates are absolute).
    fn fill_row(&mut self, y: u64, x0: u64, x1: u64) {
        for x in x0..x1 {
            self.insert(Cell::new(x, y));
        }
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Covered cells in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = Cell> + '_ {
        self.bits.iter().enumerate().flat_map(move |(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as u64;
                w &= w - 1;
                let i = wi as u64 * 64 + bit;
                Some(Cell::new(self.origin.x + i % self.width, self.origin.y + i / self.width))
            })
        })
    }

    /// True when `c` is covered and at least one 4-neighbour is uncovered or
    /// off the grid.
    pub fn is_boundary(&self, c: Cell) -> bool {
        if !self.contains(c) {
            return false;
        }
        let last = self.order.side() - 1;
        c.x == 0
            || c.y == 0
            || c.x == last
            || c.y == last
            || !self.contains(Cell::new(c.x - 1, c.y))
            || !self.contains(Cell::new(c.x + 1, c.y))
            || !self.contains(Cell::new(c.x, c.y - 1))
            || !self.contains(Cell::new(c.x, c.y + 1))
    }

    /// Cells with an uncovered 4-neighbour, row-major.
    pub fn boundary_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.iter().filter(move |&c| self.is_boundary(c))
    }

    /// Union of two masks of the same order.
    pub fn union(&self, other: &CellMask) -> Result<CellMask> {
        if self.order != other.order {
            return Err(Error::OrderMismatch { expected: self.order.get(), found: other.order.get() });
        }
        CellMask::from_cells(self.order, self.iter().chain(other.iter()))
    }
}

/// Rasterizes the outer ring: a cell is covered iff its centre
/// `(x + 0.5, y + 0.5)` is inside under the even-odd rule. Holes are ignored.
pub fn polygon_to_mask<T: Scalar>(polygon: &VertexPolygon<T>, order: CurveOrder) -> Result<CellMask> {
    let side = T::lattice(order.side());
    let ring = polygon.outer();
    for p in ring.vertices() {
        if p.x < T::zero() || p.y < T::zero() || p.x > side || p.y > side {
            return Err(Error::domain(format!(
                "vertex ({}, {}) outside the order-{order} grid [0, {}]",
                p.x,
                p.y,
                order.side()
            )));
        }
    }
    let (lo, hi) = polygon.bounds();
    let last = order.side() - 1;
    let to_cell = |v: T| v.floor().to_u64().unwrap_or(0).min(last);
    let min = Cell::new(to_cell(lo.x), to_cell(lo.y));
    let max = Cell::new(to_cell(hi.x), to_cell(hi.y));
    let mut mask = CellMask::with_window(order, min, max)?;

    let half = T::half();
    let mut crossings: Vec<T> = Vec::new();
    for y in min.y..=max.y {
        let cy = T::lattice(y) + half;
        crossings.clear();
        for (a, b) in ring.edges() {
            if (a.y > cy) != (b.y > cy) {
                crossings.push((b.x - a.x) * (cy - a.y) / (b.y - a.y) + a.x);
            }
        }
        crossings.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for span in crossings.chunks_exact(2) {
            // Cover x where span[0] <= x + 0.5 < span[1].
            let mut x = min.x;
            let start_guess = (span[0] - half).floor();
            if start_guess > T::lattice(x) {
                x = start_guess.to_u64().unwrap_or(x);
            }
            while x <= max.x && T::lattice(x) + half < span[0] {
                x += 1;
            }
            while x <= max.x && T::lattice(x) + half < span[1] {
                mask.insert(Cell::new(x, y));
                x += 1;
            }
        }
    }
    Ok(mask)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Dir {
    East,
    South,
    West,
    North,
}

impl Dir {
    fn right(self) -> Dir {
        match self {
            Dir::East => Dir::South,
            Dir::South => Dir::West,
            Dir::West => Dir::North,
            Dir::North => Dir::East,
        }
    }

    fn left(self) -> Dir {
        self.right().right().right()
    }

    fn step(self, (x, y): (i64, i64)) -> (i64, i64) {
        match self {
            Dir::East => (x + 1, y),
            Dir::South => (x, y + 1),
            Dir::West => (x - 1, y),
            Dir::North => (x, y - 1),
        }
    }

    /// Cells ahead of vertex `v` when travelling in this direction:
    /// `(ahead_left, ahead_right)` with y pointing down.
    fn ahead(self, (x, y): (i64, i64)) -> ((i64, i64), (i64, i64)) {
        match self {
            Dir::East => ((x, y - 1), (x, y)),
            Dir::South => ((x, y), (x - 1, y)),
            Dir::West => ((x - 1, y), (x - 1, y - 1)),
            Dir::North => ((x - 1, y - 1), (x, y - 1)),
        }
    }
}

/// Component labels over a mask window.
struct Labels {
    origin: Cell,
    width: i64,
    height: i64,
    label: Vec<u32>,
}

impl Labels {
    fn get(&self, (x, y): (i64, i64)) -> u32 {
        let dx = x - self.origin.x as i64;
        let dy = y - self.origin.y as i64;
        if dx < 0 || dy < 0 || dx >= self.width || dy >= self.height {
            0
        } else {
            self.label[(dy * self.width + dx) as usize]
        }
    }
}

/// Labels 4-connected components; returns labels and the first (top-most,
/// then left-most) cell of each component in label order.
fn label_components(mask: &CellMask) -> (Labels, Vec<Cell>) {
    let mut labels = Labels {
        origin: mask.origin,
        width: mask.width as i64,
        height: mask.height as i64,
        label: vec![0; (mask.width * mask.height) as usize],
    };
    let mut seeds = Vec::new();
    let mut queue = VecDeque::new();
    for cell in mask.iter() {
        let key = (cell.x as i64, cell.y as i64);
        if labels.get(key) != 0 {
            continue;
        }
        seeds.push(cell);
        let id = seeds.len() as u32;
        let idx = |labels: &Labels, (x, y): (i64, i64)| {
            ((y - labels.origin.y as i64) * labels.width + (x - labels.origin.x as i64)) as usize
        };
        let i = idx(&labels, key);
        labels.label[i] = id;
        queue.push_back(key);
        while let Some((x, y)) = queue.pop_front() {
            for n in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
                if n.0 < 0 || n.1 < 0 {
                    continue;
                }
                let c = Cell::new(n.0 as u64, n.1 as u64);
                if mask.contains(c) && labels.get(n) == 0 {
                    let j = idx(&labels, n);
                    labels.label[j] = id;
                    queue.push_back(n);
                }
            }
        }
    }
    (labels, seeds)
}

/// Walks the outer boundary of component `id` starting at the top-left
/// corner of `seed`, keeping the component on the right-hand side.
///
/// At a corner shared only diagonally by two component cells the walk turns
/// right, so diagonal contacts never merge regions and every uncovered cell
/// reachable through such a corner stays outside the ring.
fn trace_outer(labels: &Labels, id: u32, seed: Cell) -> Vec<(i64, i64)> {
    let inside = |c: (i64, i64)| labels.get(c) == id;
    let start = (seed.x as i64, seed.y as i64);
    let mut vertex = start;
    let mut dir = Dir::East;
    let mut corners = vec![start];
    loop {
        vertex = dir.step(vertex);
        let (ahead_left, ahead_right) = dir.ahead(vertex);
        let next = if !inside(ahead_right) {
            dir.right()
        } else if !inside(ahead_left) {
            dir
        } else {
            dir.left()
        };
        if vertex == start && next == Dir::East {
            break;
        }
        if next != dir {
            corners.push(vertex);
        }
        dir = next;
    }
    corners
}

/// One outer ring per 4-connected component, with vertices on cell corners.
/// Rasterizing a ring reproduces its component with any holes filled.
pub fn mask_to_polygon<T: Scalar>(mask: &CellMask) -> Vec<VertexPolygon<T>> {
    if mask.is_empty() {
        return Vec::new();
    }
    let (labels, seeds) = label_components(mask);
    seeds
        .iter()
        .enumerate()
        .map(|(i, &seed)| {
            let corners = trace_outer(&labels, i as u32 + 1, seed);
            let points =
                corners.into_iter().map(|(x, y)| Point::new(T::lattice(x as u64), T::lattice(y as u64))).collect();
            VertexPolygon::from_outer(Ring::new(points).expect("traced ring has at least 4 corners"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::parse_wkt;

    fn order(n: u8) -> CurveOrder {
        CurveOrder::new(n).unwrap()
    }

    fn corners<T: Scalar>(p: &VertexPolygon<T>) -> Vec<(f64, f64)> {
        p.outer().vertices().iter().map(|v| (v.x.to_f64().unwrap(), v.y.to_f64().unwrap())).collect()
    }

    #[test]
    fn unit_square_covers_one_cell() {
        let p: VertexPolygon<f64> = parse_wkt("POLYGON ((0 0, 0 1, 1 1, 1 0))").unwrap();
        let m = polygon_to_mask(&p, order(1)).unwrap();
        assert_eq!(m.iter().collect::<Vec<_>>(), vec![Cell::new(0, 0)]);
    }

    #[test]
    fn full_grid_square() {
        let p: VertexPolygon<f32> = parse_wkt("POLYGON ((0 0, 8 0, 8 8, 0 8))").unwrap();
        let m = polygon_to_mask(&p, order(3)).unwrap();
        assert_eq!(m.count(), 64);
        assert_eq!(m, CellMask::full_grid(order(3)));
    }

    #[test]
    fn vertex_outside_grid() {
        let p: VertexPolygon<f64> = parse_wkt("POLYGON ((0 0, 9 0, 0 5))").unwrap();
        assert!(matches!(polygon_to_mask(&p, order(3)), Err(Error::Domain(_))));
    }

    #[test]
    fn single_cell_outline() {
        let m = CellMask::from_cells(order(2), [Cell::new(0, 0)]).unwrap();
        let rings = mask_to_polygon::<f64>(&m);
        assert_eq!(rings.len(), 1);
        assert_eq!(corners(&rings[0]), vec![(0., 0.), (1., 0.), (1., 1.), (0., 1.)]);
    }

    #[test]
    fn block_outline() {
        let m = CellMask::from_cells(order(3), [Cell::new(2, 3), Cell::new(3, 3), Cell::new(2, 4), Cell::new(3, 4)])
            .unwrap();
        let rings = mask_to_polygon::<f64>(&m);
        assert_eq!(corners(&rings[0]), vec![(2., 3.), (4., 3.), (4., 5.), (2., 5.)]);
    }

    #[test]
    fn diagonal_cells_are_separate_components() {
        let m = CellMask::from_cells(order(2), [Cell::new(0, 0), Cell::new(1, 1)]).unwrap();
        let rings = mask_to_polygon::<f64>(&m);
        assert_eq!(rings.len(), 2);
        assert!(rings.iter().all(|r| r.outer().len() == 4));
    }

    #[test]
    fn pinched_pocket_stays_outside() {
        // A U-shape whose arm touches the base diagonally: the pocket at (1,1)
        // reaches the outside only through a corner.
        let cells = [(0, 0), (1, 0), (2, 0), (2, 1), (0, 1), (0, 2), (1, 2)].map(|(x, y)| Cell::new(x, y));
        let m = CellMask::from_cells(order(2), cells).unwrap();
        let rings = mask_to_polygon::<f64>(&m);
        assert_eq!(rings.len(), 1);
        assert_eq!(polygon_to_mask(&rings[0], order(2)).unwrap(), m);
    }

    #[test]
    fn boundary_detection() {
        let m = CellMask::full_grid(order(2));
        assert_eq!(m.boundary_cells().count(), 12);
        let m = CellMask::from_cells(order(3), (1..6).flat_map(|y| (1..6).map(move |x| Cell::new(x, y)))).unwrap();
        assert_eq!(m.boundary_cells().count(), 16);
        assert!(!m.is_boundary(Cell::new(3, 3)));
    }

    #[test]
    fn empty_mask_has_no_polygons() {
        assert!(mask_to_polygon::<f64>(&CellMask::empty(order(3))).is_empty());
    }
}
