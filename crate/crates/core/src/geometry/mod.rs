//! Polygon interchange formats and rasterization.

mod geojson;
mod mask;
mod polygon;
mod range_doc;
mod records;
mod svg;
mod wkt;

pub use geojson::{parse_geojson_polygon, to_geojson_value};
pub use mask::{mask_to_polygon, polygon_to_mask, CellMask};
pub use polygon::{Point, Ring, VertexPolygon};
pub use range_doc::{parse_range_document, serialize_range_document, RangeDocument};
pub use records::{parse_geometry, parse_record, parse_records, NumberedRecord, PolygonRecord};
pub use svg::{parse_svg_points, to_svg_points};
pub use wkt::{parse_wkt, to_wkt};
