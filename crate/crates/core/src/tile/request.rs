//! Tile request grammar: `{identifier}/{region}/{size}/{rotation}/{quality}.{format}`.

use std::fmt;
use std::str::FromStr;

use crate::codec::Rect;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Format {
    Jpg,
    Png,
    Json,
}

impl Format {
    pub fn content_type(self) -> &'static str {
        match self {
            Format::Jpg => "image/jpeg",
            Format::Png => "image/png",
            Format::Json => "application/json",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Jpg => "jpg",
            Format::Png => "png",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jpg" => Ok(Format::Jpg),
            "png" => Ok(Format::Png),
            "json" => Ok(Format::Json),
            other => Err(Error::BadRequest(format!("unknown format '{other}'"))),
        }
    }
}

/// Pixel region of the base image: upper-left corner and size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    pub x: u64,
    pub y: u64,
    pub w: u64,
    pub h: u64,
}

impl Region {
    pub fn rect(&self) -> Rect {
        Rect::from_region(self.x, self.y, self.w, self.h).expect("region sizes are validated at parse time")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TileRequest {
    pub identifier: String,
    pub region: Region,
    pub out_w: u64,
    pub out_h: u64,
    pub rotation: u32,
    pub quality: String,
    pub format: Format,
}

impl fmt::Display for TileRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.region;
        write!(
            f,
            "{}/{},{},{},{}/{},{}/{}/{}.{}",
            self.identifier,
            r.x,
            r.y,
            r.w,
            r.h,
            self.out_w,
            self.out_h,
            self.rotation,
            self.quality,
            self.format.extension()
        )
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadRequest(msg.into())
}

fn parse_u64(text: &str, what: &str) -> Result<u64> {
    text.parse::<u64>().map_err(|_| bad(format!("{what} '{text}' is not a non-negative integer")))
}

fn parse_region(text: &str) -> Result<Region> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(bad(format!("region '{text}' must be x,y,w,h")));
    }
    let x = parse_u64(parts[0], "region x")?;
    let y = parse_u64(parts[1], "region y")?;
    let w = parse_u64(parts[2], "region width")?;
    let h = parse_u64(parts[3], "region height")?;
    if w == 0 || h == 0 {
        return Err(bad(format!("region '{text}' is empty")));
    }
    if x.checked_add(w).is_none() || y.checked_add(h).is_none() {
        return Err(bad(format!("region '{text}' overflows")));
    }
    Ok(Region { x, y, w, h })
}

/// `w,h`, `w,` or `,h` (aspect kept from the region), or `max`/`full`.
fn parse_size(text: &str, region: &Region) -> Result<(u64, u64)> {
    if text == "max" || text == "full" {
        return Ok((region.w, region.h));
    }
    let (w, h) = text.split_once(',').ok_or_else(|| bad(format!("size '{text}' must be w,h")))?;
    let scaled = |num: u64, a: u64, b: u64| ((num as u128 * a as u128 + b as u128 / 2) / b as u128).max(1) as u64;
    let size = match (w.is_empty(), h.is_empty()) {
        (false, false) => (parse_u64(w, "width")?, parse_u64(h, "height")?),
        (false, true) => {
            let w = parse_u64(w, "width")?;
            (w, scaled(w, region.h, region.w))
        }
        (true, false) => {
            let h = parse_u64(h, "height")?;
            (scaled(h, region.w, region.h), h)
        }
        (true, true) => return Err(bad("size ',' names no dimension")),
    };
    if size.0 == 0 || size.1 == 0 {
        return Err(bad(format!("size '{text}' is empty")));
    }
    Ok(size)
}

/// Parses the five path segments following the service prefix.
pub fn parse_tile_url(path: &str) -> Result<TileRequest> {
    let segments: Vec<&str> = path.trim_start_matches('/').split('/').collect();
    if segments.len() != 5 || segments.iter().any(|s| s.is_empty()) {
        return Err(bad(format!(
            "expected {{identifier}}/{{region}}/{{size}}/{{rotation}}/{{quality}}.{{format}}, got '{path}'"
        )));
    }
    let identifier = segments[0].to_string();
    let region = parse_region(segments[1])?;
    let (out_w, out_h) = parse_size(segments[2], &region)?;

    let rotation_text = segments[3];
    if let Some(rest) = rotation_text.strip_prefix('!') {
        parse_u64(rest, "rotation")?;
        return Err(Error::NotImplemented("mirroring".into()));
    }
    let rotation: f64 =
        rotation_text.parse().map_err(|_| bad(format!("rotation '{rotation_text}' is not a number")))?;
    if rotation != 0.0 {
        return Err(Error::NotImplemented(format!("rotation {rotation_text}")));
    }

    let (quality, format) =
        segments[4].rsplit_once('.').ok_or_else(|| bad(format!("'{}' lacks a format extension", segments[4])))?;
    let format: Format = format.parse()?;
    if quality != "default" {
        return Err(Error::NotImplemented(format!("quality '{quality}'")));
    }
    Ok(TileRequest { identifier, region, out_w, out_h, rotation: 0, quality: quality.to_string(), format })
}
