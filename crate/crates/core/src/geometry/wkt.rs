//! Well-known text `POLYGON` literals.
//!
//! Input accepts both the standard `POLYGON ((x y, ...), (...))` form and the
//! single-parenthesis `POLYGON (x y, ...)` shorthand. Output is always the
//! standard double-parenthesis form.

use std::fmt::Write as _;

use super::polygon::{Point, Ring, VertexPolygon};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { text, pos: 0 }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(found) if found == c => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(found) => Err(Error::parse(self.pos, format!("expected '{c}', found '{found}'"))),
            None => Err(Error::parse(self.pos, format!("expected '{c}', found end of input"))),
        }
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn number<T: Scalar>(&mut self) -> Result<T> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E')))
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(match rest.chars().next() {
                Some(c) => Error::parse(start, format!("expected a number, found '{c}'")),
                None => Error::parse(start, "expected a number, found end of input"),
            });
        }
        self.pos += len;
        rest[..len].parse::<T>().map_err(|_| Error::parse(start, format!("invalid number '{}'", &rest[..len])))
    }
}

fn coordinate_list<T: Scalar>(cur: &mut Cursor<'_>) -> Result<(usize, Vec<Point<T>>)> {
    let start = cur.pos;
    let mut points = Vec::new();
    loop {
        let x = cur.number()?;
        let y = cur.number()?;
        // Tolerate a Z/M ordinate by skipping any further numbers in the tuple.
        while matches!(cur.peek(), Some(c) if c.is_ascii_digit() || c == '-' || c == '+' || c == '.') {
            cur.number::<T>()?;
        }
        points.push(Point::new(x, y));
        if cur.peek() == Some(',') {
            cur.expect(',')?;
        } else {
            break;
        }
    }
    Ok((start, points))
}

fn ring_at<T: Scalar>(offset: usize, points: Vec<Point<T>>) -> Result<Ring<T>> {
    Ring::new(points).map_err(|e| match e {
        Error::Validation(msg) => Error::parse(offset, msg),
        other => other,
    })
}

/// Parses a `POLYGON` literal.
pub fn parse_wkt<T: Scalar>(text: &str) -> Result<VertexPolygon<T>> {
    let mut cur = Cursor::new(text);
    let keyword = cur.word();
    if keyword.is_empty() {
        return Err(Error::parse(cur.pos, "expected a geometry keyword"));
    }
    if !keyword.eq_ignore_ascii_case("POLYGON") {
        return Err(Error::UnsupportedGeometry(keyword.to_ascii_uppercase()));
    }
    let tag = cur.pos;
    if cur.word().eq_ignore_ascii_case("EMPTY") {
        return Err(Error::parse(tag, "empty polygon"));
    }
    cur.pos = tag;
    cur.expect('(')?;

    let mut rings = Vec::new();
    if cur.peek() == Some('(') {
        loop {
            cur.expect('(')?;
            let (offset, points) = coordinate_list(&mut cur)?;
            cur.expect(')')?;
            rings.push(ring_at(offset, points)?);
            if cur.peek() == Some(',') {
                cur.expect(',')?;
            } else {
                break;
            }
        }
    } else {
        let (offset, points) = coordinate_list(&mut cur)?;
        rings.push(ring_at(offset, points)?);
    }
    cur.expect(')')?;
    if let Some(c) = cur.peek() {
        return Err(Error::parse(cur.pos, format!("trailing input starting at '{c}'")));
    }
    VertexPolygon::new(rings)
}

/// Standard double-parenthesis WKT with every ring explicitly closed.
pub fn to_wkt<T: Scalar>(polygon: &VertexPolygon<T>) -> String {
    let mut out = String::from("POLYGON (");
    for (i, ring) in polygon.rings().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push('(');
        for (j, p) in ring.closed().enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{} {}", p.x, p.y);
        }
        out.push(')');
    }
    out.push(')');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(v: &[(f64, f64)]) -> Vec<Point<f64>> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn single_paren_form() {
        let p: VertexPolygon<f64> = parse_wkt("POLYGON (1 1, 1 4, 3 5, 5 3, 4 1, 1 1)").unwrap();
        assert_eq!(p.outer().vertices(), ring(&[(1., 1.), (1., 4.), (3., 5.), (5., 3.), (4., 1.)]).as_slice());
    }

    #[test]
    fn double_paren_with_hole() {
        let p: VertexPolygon<f64> = parse_wkt("polygon ((0 0, 10 0, 10 10, 0 10, 0 0), (2 2, 2 4, 4 4, 2 2))").unwrap();
        assert_eq!(p.rings().len(), 2);
        assert_eq!(p.holes()[0].len(), 3);
    }

    #[test]
    fn multiline_literal_with_seventeen_vertices() {
        let text = "POLYGON ((22284 70778, 22281 70781, 22281 70783, 22283\n70785, 22284 70785, \
                    22286 70787, 22288 70787, 22289 70786, 22291 70786, 22292 70785, 22293\n70785, \
                    22293 70783, 22291 70781, 22291 70780, 22290 70780, 22289 70779, 22286 70779))";
        let p: VertexPolygon<f64> = parse_wkt(text).unwrap();
        assert_eq!(p.outer().len(), 17);
        assert_eq!(p.outer().vertices()[3], Point::new(22283., 70785.));
    }

    #[test]
    fn errors_carry_offsets() {
        match parse_wkt::<f64>("POLYGON ()") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 9),
            other => panic!("unexpected {other:?}"),
        }
        match parse_wkt::<f64>("POLYGON ((0 0, 1 x, 1 1))") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 17),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_wkt::<f64>("POLYGON ((0 0, 1 1))"), Err(Error::Parse { .. })));
        assert!(matches!(parse_wkt::<f64>("POLYGON EMPTY"), Err(Error::Parse { .. })));
        assert!(matches!(parse_wkt::<f64>("POLYGON ((0 0, 1 0, 1 1)) x"), Err(Error::Parse { .. })));
    }

    #[test]
    fn other_geometries_unsupported() {
        assert!(matches!(parse_wkt::<f64>("POINT (1 2)"), Err(Error::UnsupportedGeometry(_))));
        assert!(matches!(parse_wkt::<f64>("MULTIPOLYGON (((0 0, 1 0, 1 1)))"), Err(Error::UnsupportedGeometry(_))));
    }

    #[test]
    fn emits_standard_form() {
        let p: VertexPolygon<f64> = parse_wkt("POLYGON (1 1, 1 4, 3 5, 5 3, 4 1, 1 1)").unwrap();
        assert_eq!(to_wkt(&p), "POLYGON ((1 1, 1 4, 3 5, 5 3, 4 1, 1 1))");
        assert_eq!(parse_wkt::<f64>(&to_wkt(&p)).unwrap(), p);
    }

    #[test]
    fn single_precision() {
        let p: VertexPolygon<f32> = parse_wkt("POLYGON ((0.5 0.5, 2.25 0.5, 2.25 3))").unwrap();
        assert_eq!(p.outer().vertices()[1], Point::new(2.25f32, 0.5));
    }
}
