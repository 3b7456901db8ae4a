//! Tile protocol: request grammar, feature tile rendering and image tiles.

mod image_source;
mod json;
mod render;
mod request;
mod style;

pub use image_source::{
    level_size, natural_level_count, render_image_tile, serve_image_tile, write_directory_pyramid, Checkerboard,
    DirectoryPyramid, ImageSource, PyramidDescriptor, DESCRIPTOR_FILE, JPEG_QUALITY,
};
pub use json::feature_tile_json;
pub use render::{encode_png, feature_response, quantize_probability, render_feature_tile, sample_coordinate};
pub use request::{parse_tile_url, Format, Region, TileRequest};
pub use style::{ClassStyle, LayerStyle};
