//! Ingestion input: newline-delimited polygon records or GeoJSON documents.
//!
//! Each line holds one geometry (WKT or a JSON object), optionally followed by
//! tab-separated class code and certainty columns. Blank lines and lines
//! starting with `#` are skipped.

use serde_json::Value;

use super::geojson::{get_ci, json_error_offset, polygon_from_value};
use super::polygon::VertexPolygon;
use super::wkt::parse_wkt;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct PolygonRecord<T> {
    pub polygon: VertexPolygon<T>,
    pub class_code: Option<String>,
    pub certainty: Option<f64>,
    pub name: Option<String>,
}

/// A record, or the reason it could not be read, tagged with its 1-based
/// line number (feature number for GeoJSON collections).
pub type NumberedRecord<T> = (usize, Result<PolygonRecord<T>>);

/// WKT or JSON geometry, chosen by the first non-blank character.
pub fn parse_geometry<T: Scalar>(text: &str) -> Result<VertexPolygon<T>> {
    if text.trim_start().starts_with('{') {
        super::geojson::parse_geojson_polygon(text)
    } else {
        parse_wkt(text)
    }
}

fn parse_certainty(text: &str) -> Result<f64> {
    let value: f64 =
        text.trim().parse().map_err(|_| Error::Validation(format!("certainty '{}' is not a number", text.trim())))?;
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Validation(format!("certainty {value} outside [0, 1]")));
    }
    Ok(value)
}

/// `geometry[\tclassCode[\tcertainty]]`
pub fn parse_record<T: Scalar>(line: &str) -> Result<PolygonRecord<T>> {
    let mut columns = line.split('\t');
    let geometry = columns.next().unwrap_or_default();
    let polygon = parse_geometry(geometry)?;
    let class_code = columns.next().map(str::trim).filter(|s| !s.is_empty()).map(str::to_string);
    let certainty = columns.next().map(str::trim).filter(|s| !s.is_empty()).map(parse_certainty).transpose()?;
    Ok(PolygonRecord { polygon, class_code, certainty, name: None })
}

fn record_from_feature<T: Scalar>(feature: &Value) -> Result<PolygonRecord<T>> {
    let polygon = polygon_from_value(feature)?;
    let props = feature.as_object().and_then(|o| get_ci(o, "properties")).and_then(Value::as_object);
    let text = |keys: &[&str]| {
        props.and_then(|p| keys.iter().find_map(|k| get_ci(p, k))).and_then(Value::as_str).map(str::to_string)
    };
    let certainty = props
        .and_then(|p| get_ci(p, "certainty"))
        .map(|v| match v {
            Value::Number(n) => parse_certainty(&n.to_string()),
            Value::String(s) => parse_certainty(s),
            other => Err(Error::Validation(format!("certainty {other} is not a number"))),
        })
        .transpose()?;
    Ok(PolygonRecord { polygon, class_code: text(&["classCode", "class"]), certainty, name: text(&["name"]) })
}

/// Reads a whole input file.
///
/// A file that is a single JSON document (a `FeatureCollection`, `Feature` or
/// `Polygon`, possibly spread over many lines) is read as such; anything else
/// is treated as one record per line.
pub fn parse_records<T: Scalar>(text: &str) -> Vec<NumberedRecord<T>> {
    if text.trim_start().starts_with('{') {
        if let Ok(doc) = serde_json::from_str::<Value>(text) {
            let kind = doc.as_object().and_then(|o| get_ci(o, "type")).and_then(Value::as_str);
            if kind.is_some_and(|k| k.eq_ignore_ascii_case("FeatureCollection")) {
                let features = doc.as_object().and_then(|o| get_ci(o, "features")).and_then(Value::as_array);
                return match features {
                    Some(features) => {
                        features.iter().enumerate().map(|(i, f)| (i + 1, record_from_feature(f))).collect()
                    }
                    None => vec![(1, Err(Error::parse(0, "feature collection without features")))],
                };
            }
            return vec![(1, record_from_feature(&doc))];
        } else if !text.trim_end().contains('\n') {
            let err = serde_json::from_str::<Value>(text).unwrap_err();
            return vec![(1, Err(Error::parse(json_error_offset(text, &err), err.to_string())))];
        }
    }
    text.lines()
        .enumerate()
        .filter(|(_, line)| {
            let t = line.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, line)| (i + 1, parse_record(line)))
        .collect()
}
