//! Feature tiles: RGBA rasters of the polygons in a region.
//!
//! Channels: red = class value from the layer style, green = quantized
//! certainty, blue = 0, alpha = 255 where a polygon covers the pixel and 0
//! (the null case) elsewhere.

use image::codecs::png::PngEncoder;
use image::{ExtendedColorType, ImageEncoder, Rgba, RgbaImage};

use super::request::{Format, TileRequest};
use super::style::LayerStyle;
use crate::codec::rect_to_intervals;
use crate::error::{Error, Result};
use crate::index::PolygonId;
use crate::pyramid::{region_at_level, FeaturePyramid};

/// Maps a probability onto 0..=255 in steps of 1/255, rounding half away
/// from zero.
pub fn quantize_probability(p: f64) -> Result<u8> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    Ok((p * 255.0).round() as u8)
}

/// Base-image coordinate sampled by output pixel `px` when `extent` pixels
/// starting at `origin` are scaled to `out` pixels (pixel-centre nearest
/// neighbour).
#[inline]
pub fn sample_coordinate(origin: u64, extent: u64, out: u64, px: u64) -> u64 {
    origin + (((2 * px as u128 + 1) * extent as u128) / (2 * out as u128)) as u64
}

/// Whether `(certainty, id)` beats `other` for a contested pixel: higher
/// certainty first, then the smaller id.
#[inline]
fn outranks(a: (f64, PolygonId), b: (f64, PolygonId)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Renders the feature tile for `req` (any format field is ignored).
pub fn render_feature_tile(pyramid: &FeaturePyramid, style: &LayerStyle, req: &TileRequest) -> Result<RgbaImage> {
    let region = req.region.rect();
    let level = pyramid.select_level(&region, req.out_w, req.out_h)?;
    let table = pyramid.level(level).expect("selected level exists");
    let (w, h) = (u32::try_from(req.out_w), u32::try_from(req.out_h));
    let (Ok(out_w), Ok(out_h)) = (w, h) else {
        return Err(Error::BadRequest(format!("output size {}x{} too large", req.out_w, req.out_h)));
    };
    let mut img = RgbaImage::new(out_w, out_h);

    let Some(cells) = region_at_level(&region, level).and_then(|r| r.clip(table.order())) else {
        return Ok(img);
    };
    let query = rect_to_intervals(&cells, table.order())?;
    let result = table.query_intervals(&query)?;

    // Winning polygon per level cell inside the clipped window.
    let (gw, gh) = (cells.width() as usize, cells.height() as usize);
    let mut owner: Vec<Option<(f64, PolygonId)>> = vec![None; gw * gh];
    for &id in &result.ids {
        let meta = table.meta(id).expect("matched ids come from the table");
        let candidate = (meta.certainty, id);
        let covered = table.intervals(id).expect("matched ids come from the table").intersection(&query)?;
        for c in covered.cells() {
            let slot = &mut owner[(c.y - cells.min_y) as usize * gw + (c.x - cells.min_x) as usize];
            if slot.is_none_or(|current| outranks(candidate, current)) {
                *slot = Some(candidate);
            }
        }
    }

    let r = &req.region;
    for py in 0..out_h {
        let cy = sample_coordinate(r.y, r.h, req.out_h, py as u64) >> level;
        if cy < cells.min_y || cy > cells.max_y {
            continue;
        }
        for px in 0..out_w {
            let cx = sample_coordinate(r.x, r.w, req.out_w, px as u64) >> level;
            if cx < cells.min_x || cx > cells.max_x {
                continue;
            }
            if let Some((certainty, id)) = owner[(cy - cells.min_y) as usize * gw + (cx - cells.min_x) as usize] {
                let red = style.red(&table.meta(id).unwrap().class_code);
                img.put_pixel(px, py, Rgba([red, quantize_probability(certainty)?, 0, 255]));
            }
        }
    }
    Ok(img)
}

/// PNG with fixed encoder settings and no ancillary chunks, so equal images
/// give equal bytes.
pub fn encode_png(img: &RgbaImage) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    PngEncoder::new(&mut out).write_image(img.as_raw(), img.width(), img.height(), ExtendedColorType::Rgba8)?;
    Ok(out)
}

/// Encoded response body for a feature request: PNG tile or JSON polygons.
pub fn feature_response(pyramid: &FeaturePyramid, style: &LayerStyle, req: &TileRequest) -> Result<Vec<u8>> {
    match req.format {
        Format::Png => encode_png(&render_feature_tile(pyramid, style, req)?),
        Format::Json => Ok(super::json::feature_tile_json(pyramid, req)?.into_bytes()),
        Format::Jpg => Err(Error::BadRequest("feature tiles are served as png or json".into())),
    }
}
