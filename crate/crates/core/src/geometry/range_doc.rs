//! Compact JSON document for a single Hilbert polygon:
//!
//! ```text
//! {
//!   "name": "Polygon 1",
//!   "type": "Nuclear Material",
//!   "Ranges": [[8,12],[17,18],[23,24],[27,36],[53,53]]
//! }
//! ```

use std::fmt::Write as _;

use serde::Deserialize;

use super::geojson::json_error_offset;
use crate::error::{Error, Result};
use crate::hilbert::HilbertIndex;

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct RangeDocument {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(rename = "Ranges")]
    pub ranges: Vec<[HilbertIndex; 2]>,
}

impl RangeDocument {
    pub fn validate(&self) -> Result<()> {
        for (i, [lo, hi]) in self.ranges.iter().enumerate() {
            if lo > hi {
                return Err(Error::Validation(format!("range {i} has lo {lo} > hi {hi}")));
            }
            if i > 0 && self.ranges[i - 1][1] >= *lo {
                return Err(Error::Validation(format!("range {i} overlaps or precedes range {}", i - 1)));
            }
        }
        Ok(())
    }
}

/// Writes the keys `name`, `type`, `Ranges` in that order, ranges on one line.
pub fn serialize_range_document(doc: &RangeDocument) -> String {
    let mut ranges = String::from("[");
    for (i, [lo, hi]) in doc.ranges.iter().enumerate() {
        if i > 0 {
            ranges.push(',');
        }
        let _ = write!(ranges, "[{lo},{hi}]");
    }
    ranges.push(']');
    format!(
        "{{\n  \"name\": {},\n  \"type\": {},\n  \"Ranges\": {}\n}}",
        serde_json::Value::from(doc.name.as_str()),
        serde_json::Value::from(doc.kind.as_str()),
        ranges
    )
}

pub fn parse_range_document(text: &str) -> Result<RangeDocument> {
    let doc: RangeDocument =
        serde_json::from_str(text).map_err(|e| Error::parse(json_error_offset(text, &e), e.to_string()))?;
    doc.validate()?;
    Ok(doc)
}
