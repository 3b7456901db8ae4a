//! Hilbert-curve feature tiles for whole-slide images.
//!
//! Region-of-interest polygons are rasterized onto a `2^n x 2^n` grid and
//! stored as runs of consecutive Hilbert indices. Spatial queries become 1-D
//! range overlap over a sorted table, a pyramid of coarser tables serves
//! zoomed-out views, and a zip container persists the result.

pub mod codec;
pub mod error;
pub mod geometry;
pub mod hilbert;
pub mod index;
pub mod pyramid;
pub mod scalar;
pub mod stats;
pub mod store;
pub mod synth;
pub mod tile;

pub use codec::{hilbert_to_polygon, polygon_to_hilbert, HilbertPolygon, IntervalSet, Rect, Span};
pub use error::{Error, Result};
pub use hilbert::{Cell, CurveOrder, HilbertIndex};
pub use index::{build_table, FeatureTable, PolygonId, PolygonMeta, QueryResult};
pub use pyramid::{build_pyramid, FeaturePyramid};
pub use scalar::Scalar;
pub use stats::StatsReport;
pub use store::{read_crate, write_crate, Dataset, Manifest};

pub type Point = geometry::Point<f64>;
pub type Ring = geometry::Ring<f64>;
pub type Polygon = geometry::VertexPolygon<f64>;
pub type Point32 = geometry::Point<f32>;
pub type Ring32 = geometry::Ring<f32>;
pub type Polygon32 = geometry::VertexPolygon<f32>;
pub type PolygonRecord = geometry::PolygonRecord<f64>;
