use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T> Point<T> {
    pub const fn new(x: T, y: T) -> Self {
        Point { x, y }
    }
}

/// A closed ring. The closing edge back to the first vertex is implicit; a
/// repeated final vertex in the source is stripped on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Ring<T> {
    vertices: Vec<Point<T>>,
}

impl<T: Scalar> Ring<T> {
    /// Normalizes closure and consecutive duplicates, then requires at least
    /// three distinct vertices.
    pub fn new(mut vertices: Vec<Point<T>>) -> Result<Self> {
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::Validation("non-finite vertex coordinate".into()));
        }
        vertices.dedup();
        while vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        let mut distinct = vertices.clone();
        distinct.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
        distinct.dedup();
        if distinct.len() < 3 {
            return Err(Error::Validation(format!(
                "ring needs at least 3 distinct vertices, found {}",
                distinct.len()
            )));
        }
        Ok(Ring { vertices })
    }

    /// Vertices without the closing repeat.
    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertices with the first one repeated at the end.
    pub fn closed(&self) -> impl Iterator<Item = Point<T>> + '_ {
        self.vertices.iter().chain(self.vertices.first()).copied()
    }

    /// Edges `(a, b)` including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (Point<T>, Point<T>)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace area; positive when the ring runs clockwise on screen (y down).
    pub fn signed_area(&self) -> T {
        let twice = self.edges().fold(T::zero(), |acc, (a, b)| acc + (a.x * b.y - b.x * a.y));
        twice * T::half()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(Point<T>) -> Point<U>) -> Ring<U> {
        Ring { vertices: self.vertices.iter().map(|&p| f(p)).collect() }
    }
}

/// Cartesian polygon: the first ring is the outer boundary, the rest are holes.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexPolygon<T> {
    rings: Vec<Ring<T>>,
}

impl<T: Scalar> VertexPolygon<T> {
    pub fn new(rings: Vec<Ring<T>>) -> Result<Self> {
        if rings.is_empty() {
            return Err(Error::Validation("polygon has no rings".into()));
        }
        Ok(VertexPolygon { rings })
    }

    pub fn from_outer(outer: Ring<T>) -> Self {
        VertexPolygon { rings: vec![outer] }
    }

    pub fn outer(&self) -> &Ring<T> {
        &self.rings[0]
    }

    pub fn rings(&self) -> &[Ring<T>] {
        &self.rings
    }

    pub fn holes(&self) -> &[Ring<T>] {
        &self.rings[1..]
    }

    /// Total vertex count over all rings, closing repeats excluded.
    pub fn vertex_count(&self) -> usize {
        self.rings.iter().map(Ring::len).sum()
    }

    /// `(min, max)` corners of the outer ring.
    pub fn bounds(&self) -> (Point<T>, Point<T>) {
        let mut lo = self.outer().vertices()[0];
        let mut hi = lo;
        for p in self.outer().vertices() {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(Point<T>) -> Point<U> + Copy) -> VertexPolygon<U> {
        VertexPolygon { rings: self.rings.iter().map(|r| r.map(f)).collect() }
    }

    /// Uniform scale about the origin.
    pub fn scaled(&self, factor: T) -> Self {
        self.map(|p| Point::new(p.x * factor, p.y * factor))
    }
}
