//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use halcyon_core::codec::Span;
use halcyon_core::geometry::{CellMask, Point, Ring, VertexPolygon};
use halcyon_core::hilbert::{xy_to_index, Cell, CurveOrder};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn order(n: u8) -> CurveOrder {
    CurveOrder::new(n).unwrap()
}

/// Sort every covered index and coalesce consecutive runs.
pub fn enumerate_runs(order: CurveOrder, cells: impl IntoIterator<Item = Cell>) -> Vec<Span> {
    let idx: BTreeSet<u64> = cells.into_iter().map(|c| xy_to_index(order, c).unwrap()).collect();
    let mut out: Vec<Span> = Vec::new();
    for h in idx {
        match out.last_mut() {
            Some(last) if last.1 + 1 == h => last.1 = h,
            _ => out.push((h, h)),
        }
    }
    out
}

/// Random mask: a few random walks plus scattered single cells.
pub fn random_mask(rng: &mut impl Rng, order: CurveOrder) -> CellMask {
    let side = order.side();
    let mut cells = HashSet::new();
    for _ in 0..rng.gen_range(1..4) {
        let mut c = Cell::new(rng.gen_range(0..side), rng.gen_range(0..side));
        for _ in 0..rng.gen_range(1..(side * side / 2).max(2)) {
            cells.insert(c);
            match rng.gen_range(0..4) {
                0 if c.x + 1 < side => c.x += 1,
                1 if c.x > 0 => c.x -= 1,
                2 if c.y + 1 < side => c.y += 1,
                3 if c.y > 0 => c.y -= 1,
                _ => {}
            }
        }
    }
    for _ in 0..rng.gen_range(0..4) {
        cells.insert(Cell::new(rng.gen_range(0..side), rng.gen_range(0..side)));
    }
    CellMask::from_cells(order, cells).unwrap()
}

/// Mask plus every uncovered cell that cannot reach outside the grid through
/// 8-connected uncovered cells (holes of 4-connected regions).
pub fn fill_holes(mask: &CellMask) -> BTreeSet<Cell> {
    let side = mask.order().side() as i64;
    let mut outside = HashSet::new();
    let mut queue = VecDeque::new();
    // Start from a virtual frame one cell outside the grid.
    for i in -1..=side {
        for c in [(i, -1), (i, side), (-1, i), (side, i)] {
            if outside.insert(c) {
                queue.push_back(c);
            }
        }
    }
    while let Some((x, y)) = queue.pop_front() {
        for dx in -1..=1 {
            for dy in -1..=1 {
                let n = (x + dx, y + dy);
                if n.0 < -1 || n.1 < -1 || n.0 > side || n.1 > side || outside.contains(&n) {
                    continue;
                }
                let in_grid = n.0 >= 0 && n.1 >= 0 && n.0 < side && n.1 < side;
                if in_grid && mask.contains(Cell::new(n.0 as u64, n.1 as u64)) {
                    continue;
                }
                outside.insert(n);
                queue.push_back(n);
            }
        }
    }
    let mut out = BTreeSet::new();
    for y in 0..side {
        for x in 0..side {
            if !outside.contains(&(x, y)) {
                out.insert(Cell::new(x as u64, y as u64));
            }
        }
    }
    out
}

/// Crossing-number point-in-polygon test over the outer ring.
pub fn point_in_ring(ring: &Ring<f64>, px: f64, py: f64) -> bool {
    let v = ring.vertices();
    let mut inside = false;
    let mut j = v.len() - 1;
    for i in 0..v.len() {
        let (a, b) = (v[i], v[j]);
        if (a.y > py) != (b.y > py) && px < (b.x - a.x) * (py - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Every cell whose centre is inside the polygon's outer ring.
pub fn raster_oracle(polygon: &VertexPolygon<f64>, order: CurveOrder) -> BTreeSet<Cell> {
    let side = order.side();
    let mut out = BTreeSet::new();
    for y in 0..side {
        for x in 0..side {
            if point_in_ring(polygon.outer(), x as f64 + 0.5, y as f64 + 0.5) {
                out.insert(Cell::new(x, y));
            }
        }
    }
    out
}

/// Random convex polygon: sorted angles around a centre with random radii
/// small enough to stay on the grid.
pub fn random_convex(rng: &mut impl Rng, order: CurveOrder) -> VertexPolygon<f64> {
    let side = order.side() as f64;
    loop {
        let r = rng.gen_range(1.0..side / 3.0);
        let cx = rng.gen_range(r..side - r);
        let cy = rng.gen_range(r..side - r);
        let n = rng.gen_range(3..9);
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pts: Vec<Point<f64>> = angles.iter().map(|a| Point::new(cx + r * a.cos(), cy + r * a.sin())).collect();
        if let Ok(ring) = Ring::new(pts) {
            return VertexPolygon::from_outer(ring);
        }
    }
}
