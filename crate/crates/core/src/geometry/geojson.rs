//! GeoJSON-style polygon objects.

use serde_json::Value;

use super::polygon::{Point, Ring, VertexPolygon};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Byte offset of a serde_json error position.
pub(crate) fn json_error_offset(text: &str, err: &serde_json::Error) -> usize {
    if err.line() == 0 {
        return 0;
    }
    let line_start: usize = text.split_inclusive('\n').take(err.line() - 1).map(str::len).sum();
    (line_start + err.column().saturating_sub(1)).min(text.len())
}

/// Case-insensitive key lookup; the key is spelled `"Type"` in some sources.
pub(crate) fn get_ci<'a>(obj: &'a serde_json::Map<String, Value>, key: &str) -> Option<&'a Value> {
    obj.get(key).or_else(|| obj.iter().find(|(k, _)| k.eq_ignore_ascii_case(key)).map(|(_, v)| v))
}

fn invalid(message: impl Into<String>) -> Error {
    Error::parse(0, message)
}

fn coordinate<T: Scalar>(v: &Value) -> Result<Point<T>> {
    let pair = v
        .as_array()
        .filter(|a| a.len() >= 2)
        .ok_or_else(|| invalid("a position must be an array of at least two numbers"))?;
    let num = |v: &Value| v.as_f64().and_then(T::from_f64).ok_or_else(|| invalid(format!("non-numeric ordinate {v}")));
    Ok(Point::new(num(&pair[0])?, num(&pair[1])?))
}

/// Builds a polygon from a `coordinates` value: an array of rings of positions.
pub(crate) fn polygon_from_coordinates<T: Scalar>(coords: &Value) -> Result<VertexPolygon<T>> {
    let rings = coords.as_array().ok_or_else(|| invalid("coordinates must be an array of rings"))?;
    if rings.is_empty() {
        return Err(invalid("coordinates hold no rings"));
    }
    let rings = rings
        .iter()
        .map(|ring| {
            let positions = ring
                .as_array()
                .filter(|r| r.iter().all(Value::is_array))
                .ok_or_else(|| invalid("each ring must be an array of positions"))?;
            let points = positions.iter().map(coordinate).collect::<Result<Vec<_>>>()?;
            Ring::new(points)
        })
        .collect::<Result<Vec<_>>>()?;
    VertexPolygon::new(rings)
}

/// Polygon geometry from an already decoded object. A `Feature` wrapper is
/// unwrapped to its geometry.
pub(crate) fn polygon_from_value<T: Scalar>(value: &Value) -> Result<VertexPolygon<T>> {
    let obj = value.as_object().ok_or_else(|| invalid("expected a JSON object"))?;
    if let Some(kind) = get_ci(obj, "type").and_then(Value::as_str) {
        if kind.eq_ignore_ascii_case("Feature") {
            let geometry = get_ci(obj, "geometry").ok_or_else(|| invalid("feature without geometry"))?;
            return polygon_from_value(geometry);
        }
        if !kind.eq_ignore_ascii_case("Polygon") {
            return Err(Error::UnsupportedGeometry(kind.to_string()));
        }
    }
    let coords = get_ci(obj, "coordinates").ok_or_else(|| invalid("missing coordinates"))?;
    polygon_from_coordinates(coords)
}

/// Parses `{"type": "Polygon", "coordinates": [[[x, y], ...], ...]}`.
pub fn parse_geojson_polygon<T: Scalar>(text: &str) -> Result<VertexPolygon<T>> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::parse(json_error_offset(text, &e), e.to_string()))?;
    polygon_from_value(&value)
}

/// Polygon geometry object with explicitly closed rings.
pub fn to_geojson_value<T: Scalar>(polygon: &VertexPolygon<T>) -> Value {
    let rings: Vec<Value> = polygon
        .rings()
        .iter()
        .map(|r| Value::Array(r.closed().map(|p| serde_json::json!([p.x.to_f64(), p.y.to_f64()])).collect()))
        .collect();
    serde_json::json!({ "type": "Polygon", "coordinates": rings })
}
