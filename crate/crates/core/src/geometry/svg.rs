//! SVG `<polygon points="...">` attribute values.

use std::fmt::Write as _;

use super::polygon::{Point, Ring, VertexPolygon};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parses `"x1,y1 x2,y2 ..."`. Commas and whitespace are interchangeable
/// separators, as in the SVG grammar.
pub fn parse_svg_points<T: Scalar>(text: &str) -> Result<VertexPolygon<T>> {
    let mut numbers = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices().chain(std::iter::once((text.len(), ' '))) {
        let sep = c.is_whitespace() || c == ',';
        match (sep, start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                let token = &text[s..i];
                let value = token.parse::<T>().map_err(|_| Error::parse(s, format!("invalid number '{token}'")))?;
                numbers.push((s, value));
                start = None;
            }
            _ => {}
        }
    }
    if numbers.len() % 2 == 1 {
        let (offset, _) = numbers[numbers.len() - 1];
        return Err(Error::parse(offset, "odd number of coordinates"));
    }
    let points = numbers.chunks(2).map(|c| Point::new(c[0].1, c[1].1)).collect();
    let ring = Ring::new(points).map_err(|e| match e {
        Error::Validation(msg) => Error::parse(0, msg),
        other => other,
    })?;
    Ok(VertexPolygon::from_outer(ring))
}

/// The outer ring as a `points` attribute value, closed explicitly.
pub fn to_svg_points<T: Scalar>(polygon: &VertexPolygon<T>) -> String {
    let mut out = String::new();
    for (i, p) in polygon.outer().closed().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{},{}", p.x, p.y);
    }
    out
}
