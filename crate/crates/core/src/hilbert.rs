//! Two-dimensional Hilbert curve over a `2^n x 2^n` cell grid.
//!
//! Orientation is fixed and persisted files depend on it: at order 1 the curve
//! visits `(0,0) -> (0,1) -> (1,1) -> (1,0)` with `y` growing downward, and
//! higher orders follow the usual recursive rotate/reflect construction.

use std::fmt;

use crate::error::{Error, Result};

/// Position along the curve.
pub type HilbertIndex = u64;

/// Largest supported order; `4^31` still fits in 62 bits.
pub const MAX_ORDER: u8 = 31;

/// Recursion depth of the curve. The grid side is `2^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveOrder(u8);

impl CurveOrder {
    pub fn new(n: u8) -> Result<Self> {
        if (1..=MAX_ORDER).contains(&n) {
            Ok(CurveOrder(n))
        } else {
            Err(Error::domain(format!("curve order {n} outside 1..={MAX_ORDER}")))
        }
    }

    /// Smallest order whose grid holds a `width x height` image.
    pub fn for_image(width: u64, height: u64) -> Result<Self> {
        let side = width.max(height).max(2);
        let n = 64 - (side - 1).leading_zeros();
        Self::new(n as u8)
    }

    #[inline]
    pub fn get(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn side(self) -> u64 {
        1u64 << self.0
    }

    /// Number of cells, `4^n`.
    #[inline]
    pub fn cell_count(self) -> u64 {
        1u64 << (2 * self.0 as u32)
    }

    #[inline]
    pub fn last_index(self) -> HilbertIndex {
        self.cell_count() - 1
    }

    /// The next coarser order, if any.
    pub fn coarser(self) -> Option<Self> {
        (self.0 > 1).then(|| CurveOrder(self.0 - 1))
    }

    #[inline]
    pub fn contains(self, cell: Cell) -> bool {
        cell.x < self.side() && cell.y < self.side()
    }
}

impl fmt::Display for CurveOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A grid cell: `x` is the column (rightward), `y` the row (downward).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub x: u64,
    pub y: u64,
}

impl Cell {
    pub const fn new(x: u64, y: u64) -> Self {
        Cell { x, y }
    }

    pub fn parent(self) -> Cell {
        Cell::new(self.x >> 1, self.y >> 1)
    }
}

impl From<(u64, u64)> for Cell {
    fn from((x, y): (u64, u64)) -> Self {
        Cell::new(x, y)
    }
}

#[inline]
fn rotate(side: u64, rx: u64, ry: u64, x: &mut u64, y: &mut u64) {
    if ry == 0 {
        if rx == 1 {
            *x = side - 1 - *x;
            *y = side - 1 - *y;
        }
        std::mem::swap(x, y);
    }
}

/// Cell visited at curve position `h`, without range checks.
#[inline]
pub(crate) fn d2xy(order: CurveOrder, h: HilbertIndex) -> Cell {
    let side = order.side();
    let (mut x, mut y) = (0u64, 0u64);
    let mut t = h;
    let mut s = 1u64;
    while s < side {
        let rx = 1 & (t >> 1);
        let ry = 1 & (t ^ rx);
        rotate(s, rx, ry, &mut x, &mut y);
        x += s * rx;
        y += s * ry;
        t >>= 2;
        s <<= 1;
    }
    Cell::new(x, y)
}

/// Curve position of `cell`, without range checks.
#[inline]
pub(crate) fn xy2d(order: CurveOrder, cell: Cell) -> HilbertIndex {
    let side = order.side();
    let (mut x, mut y) = (cell.x, cell.y);
    let mut d = 0u64;
    let mut s = side >> 1;
    while s > 0 {
        let rx = u64::from(x & s > 0);
        let ry = u64::from(y & s > 0);
        d += s * s * ((3 * rx) ^ ry);
        rotate(side, rx, ry, &mut x, &mut y);
        s >>= 1;
    }
    d
}

/// Returns the cell at curve position `h`.
pub fn index_to_xy(order: CurveOrder, h: HilbertIndex) -> Result<Cell> {
    if h > order.last_index() {
        return Err(Error::domain(format!("index {h} past the end of an order-{order} curve")));
    }
    Ok(d2xy(order, h))
}

/// Returns the curve position of `cell`; exact inverse of [`index_to_xy`].
pub fn xy_to_index(order: CurveOrder, cell: Cell) -> Result<HilbertIndex> {
    if !order.contains(cell) {
        return Err(Error::domain(format!(
            "cell ({}, {}) outside the {}x{} grid",
            cell.x,
            cell.y,
            order.side(),
            order.side()
        )));
    }
    Ok(xy2d(order, cell))
}

/// Index of the containing cell one order coarser.
///
/// Every aligned run of four positions fills one 2x2 block, so the parent is
/// a plain shift.
#[inline]
pub const fn parent_index(h: HilbertIndex) -> HilbertIndex {
    h >> 2
}
