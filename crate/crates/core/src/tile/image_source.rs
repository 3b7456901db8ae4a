//! Base-image sources for plain (non-feature) tile requests.

use std::io::Cursor;
use std::path::{Path, PathBuf};

use image::codecs::jpeg::JpegEncoder;
use image::{DynamicImage, GenericImageView, ImageFormat, Rgba, RgbaImage};
use serde::{Deserialize, Serialize};

use super::render::{encode_png, sample_coordinate};
use super::request::{Format, TileRequest};
use crate::error::{Error, Result};
use crate::pyramid::select_level;

pub const JPEG_QUALITY: u8 = 90;

/// A multi-resolution raster. Level `k` is the base image halved `k` times,
/// `ceil(width / 2^k) x ceil(height / 2^k)` pixels.
pub trait ImageSource: Send + Sync {
    fn width(&self) -> u64;
    fn height(&self) -> u64;
    fn level_count(&self) -> usize;
    /// A `w x h` window of level `level` whose upper-left pixel is `(x, y)`.
    fn read_region(&self, level: usize, x: u64, y: u64, w: u32, h: u32) -> Result<RgbaImage>;
}

pub fn level_size(width: u64, height: u64, level: usize) -> (u64, u64) {
    (width.div_ceil(1 << level), height.div_ceil(1 << level))
}

/// Number of halvings until the image fits in one `tile_size` tile, plus one.
pub fn natural_level_count(width: u64, height: u64, tile_size: u64) -> usize {
    let mut levels = 1;
    let mut side = width.max(height);
    while side > tile_size {
        side = side.div_ceil(2);
        levels += 1;
    }
    levels
}

fn check_window(source: &dyn ImageSource, level: usize, x: u64, y: u64, w: u32, h: u32) -> Result<()> {
    if level >= source.level_count() {
        return Err(Error::domain(format!("level {level} beyond {}", source.level_count())));
    }
    let (lw, lh) = level_size(source.width(), source.height(), level);
    if x + w as u64 > lw || y + h as u64 > lh {
        return Err(Error::BadRequest(format!("window ({x},{y}) {w}x{h} exceeds level {level} ({lw}x{lh})")));
    }
    Ok(())
}

/// Procedural two-tone checkerboard of `square`-pixel squares. A pixel of
/// level `k` takes the colour of its upper-left base pixel.
#[derive(Clone, Debug)]
pub struct Checkerboard {
    pub width: u64,
    pub height: u64,
    pub square: u64,
    pub levels: usize,
}

impl Checkerboard {
    pub const LIGHT: Rgba<u8> = Rgba([230, 230, 230, 255]);
    pub const DARK: Rgba<u8> = Rgba([40, 40, 40, 255]);

    pub fn new(width: u64, height: u64, square: u64) -> Self {
        Checkerboard { width, height, square: square.max(1), levels: natural_level_count(width, height, 256) }
    }

    /// Colour of base pixel `(x, y)`.
    pub fn base_color(&self, x: u64, y: u64) -> Rgba<u8> {
        if (x / self.square + y / self.square).is_multiple_of(2) {
            Self::LIGHT
        } else {
            Self::DARK
        }
    }
}

impl ImageSource for Checkerboard {
    fn width(&self) -> u64 {
        self.width
    }

    fn height(&self) -> u64 {
        self.height
    }

    fn level_count(&self) -> usize {
        self.levels
    }

    fn read_region(&self, level: usize, x: u64, y: u64, w: u32, h: u32) -> Result<RgbaImage> {
        check_window(self, level, x, y, w, h)?;
        Ok(RgbaImage::from_fn(w, h, |px, py| self.base_color((x + px as u64) << level, (y + py as u64) << level)))
    }
}

/// Descriptor file of a directory pyramid (`pyramid.json`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PyramidDescriptor {
    pub width: u64,
    pub height: u64,
    pub tile_size: u32,
    pub levels: usize,
    /// `png` or `jpg`.
    pub format: String,
}

pub const DESCRIPTOR_FILE: &str = "pyramid.json";

/// Pre-tiled pyramid on disk: `<root>/pyramid.json` and
/// `<root>/<level>/<col>_<row>.<format>` tiles of `tileSize` pixels (edge
/// tiles may be smaller).
#[derive(Clone, Debug)]
pub struct DirectoryPyramid {
    root: PathBuf,
    descriptor: PyramidDescriptor,
}

impl DirectoryPyramid {
    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        let descriptor: PyramidDescriptor = serde_json::from_slice(&std::fs::read(root.join(DESCRIPTOR_FILE))?)?;
        if descriptor.width == 0 || descriptor.height == 0 || descriptor.tile_size == 0 || descriptor.levels == 0 {
            return Err(Error::Validation(format!("degenerate pyramid descriptor in {}", root.display())));
        }
        if !matches!(descriptor.format.as_str(), "png" | "jpg") {
            return Err(Error::Validation(format!("tile format '{}' is not png or jpg", descriptor.format)));
        }
        Ok(DirectoryPyramid { root, descriptor })
    }

    pub fn descriptor(&self) -> &PyramidDescriptor {
        &self.descriptor
    }

    fn tile_path(&self, level: usize, col: u64, row: u64) -> PathBuf {
        self.root.join(level.to_string()).join(format!("{col}_{row}.{}", self.descriptor.format))
    }
}

impl ImageSource for DirectoryPyramid {
    fn width(&self) -> u64 {
        self.descriptor.width
    }

    fn height(&self) -> u64 {
        self.descriptor.height
    }

    fn level_count(&self) -> usize {
        self.descriptor.levels
    }

    fn read_region(&self, level: usize, x: u64, y: u64, w: u32, h: u32) -> Result<RgbaImage> {
        check_window(self, level, x, y, w, h)?;
        let ts = self.descriptor.tile_size as u64;
        let mut out = RgbaImage::new(w, h);
        let (x1, y1) = (x + w as u64, y + h as u64);
        for row in y / ts..y1.div_ceil(ts) {
            for col in x / ts..x1.div_ceil(ts) {
                let tile = image::open(self.tile_path(level, col, row))?;
                let (tx, ty) = (col * ts, row * ts);
                let (sx0, sy0) = (x.max(tx), y.max(ty));
                let sx1 = x1.min(tx + tile.width() as u64);
                let sy1 = y1.min(ty + tile.height() as u64);
                for sy in sy0..sy1 {
                    for sx in sx0..sx1 {
                        let p = tile.get_pixel((sx - tx) as u32, (sy - ty) as u32);
                        out.put_pixel((sx - x) as u32, (sy - y) as u32, p);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Tiles `source` into a directory pyramid.
pub fn write_directory_pyramid(
    source: &dyn ImageSource,
    root: impl AsRef<Path>,
    tile_size: u32,
    format: Format,
) -> Result<PyramidDescriptor> {
    let image_format = match format {
        Format::Png => ImageFormat::Png,
        Format::Jpg => ImageFormat::Jpeg,
        Format::Json => return Err(Error::BadRequest("pyramid tiles must be png or jpg".into())),
    };
    let root = root.as_ref();
    let ts = tile_size as u64;
    for level in 0..source.level_count() {
        let dir = root.join(level.to_string());
        std::fs::create_dir_all(&dir)?;
        let (lw, lh) = level_size(source.width(), source.height(), level);
        for row in 0..lh.div_ceil(ts) {
            for col in 0..lw.div_ceil(ts) {
                let (x, y) = (col * ts, row * ts);
                let (w, h) = ((lw - x).min(ts) as u32, (lh - y).min(ts) as u32);
                let tile = source.read_region(level, x, y, w, h)?;
                let path = dir.join(format!("{col}_{row}.{}", format.extension()));
                match format {
                    Format::Jpg => DynamicImage::ImageRgba8(tile).to_rgb8().save_with_format(path, image_format)?,
                    _ => tile.save_with_format(path, image_format)?,
                }
            }
        }
    }
    let descriptor = PyramidDescriptor {
        width: source.width(),
        height: source.height(),
        tile_size,
        levels: source.level_count(),
        format: format.extension().to_string(),
    };
    std::fs::write(root.join(DESCRIPTOR_FILE), serde_json::to_vec_pretty(&descriptor)?)?;
    Ok(descriptor)
}

/// Crops the request region from the coarsest adequate level and scales it
/// to the output size by pixel-centre nearest neighbour.
pub fn render_image_tile(source: &dyn ImageSource, req: &TileRequest) -> Result<RgbaImage> {
    let r = &req.region;
    if r.x + r.w > source.width() || r.y + r.h > source.height() {
        return Err(Error::BadRequest(format!(
            "region {},{},{},{} outside the {}x{} image",
            r.x,
            r.y,
            r.w,
            r.h,
            source.width(),
            source.height()
        )));
    }
    let (Ok(out_w), Ok(out_h)) = (u32::try_from(req.out_w), u32::try_from(req.out_h)) else {
        return Err(Error::BadRequest("output size too large".into()));
    };
    let level = select_level(&req.region.rect(), req.out_w, req.out_h, source.level_count() - 1)?;
    let (lx0, ly0) = (r.x >> level, r.y >> level);
    let (lx1, ly1) = ((r.x + r.w - 1) >> level, (r.y + r.h - 1) >> level);
    let window = source.read_region(level, lx0, ly0, (lx1 - lx0 + 1) as u32, (ly1 - ly0 + 1) as u32)?;
    let cols: Vec<u32> =
        (0..out_w as u64).map(|px| ((sample_coordinate(r.x, r.w, req.out_w, px) >> level) - lx0) as u32).collect();
    Ok(RgbaImage::from_fn(out_w, out_h, |px, py| {
        let row = ((sample_coordinate(r.y, r.h, req.out_h, py as u64) >> level) - ly0) as u32;
        *window.get_pixel(cols[px as usize], row)
    }))
}

/// Encoded image tile in the requested format.
pub fn serve_image_tile(source: &dyn ImageSource, req: &TileRequest) -> Result<Vec<u8>> {
    let img = render_image_tile(source, req)?;
    match req.format {
        Format::Png => encode_png(&img),
        Format::Jpg => {
            let rgb = DynamicImage::ImageRgba8(img).to_rgb8();
            let mut out = Cursor::new(Vec::new());
            rgb.write_with_encoder(JpegEncoder::new_with_quality(&mut out, JPEG_QUALITY))?;
            Ok(out.into_inner())
        }
        Format::Json => Err(Error::BadRequest("image tiles are served as jpg or png".into())),
    }
}
