//! Dataset container: a zip archive holding a JSON manifest and, per layer,
//! a polygon sidecar plus one binary range table per pyramid level.
//!
//! ```text
//! crate-metadata.json
//! layers/<layer>/polygons.json
//! layers/<layer>/level-0.htbl
//! layers/<layer>/level-1.htbl
//! ...
//! ```
//!
//! Range table (`.htbl`), little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "HTBL"
//! 4       4     version (u32) = 1
//! 8       1     curve order (u8)
//! 9       7     reserved, zero
//! 16      8     row count (u64)
//! 24      24*n  rows: start u64, end u64, polygon id u64; sorted by start
//! ```

use std::collections::BTreeMap;
use std::io::{Cursor, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use zip::write::SimpleFileOptions;
use zip::{CompressionMethod, DateTime, ZipArchive, ZipWriter};

use crate::error::{Error, Result};
use crate::hilbert::CurveOrder;
use crate::index::{FeatureTable, PolygonId, PolygonMeta};
use crate::pyramid::FeaturePyramid;

pub const METADATA_ENTRY: &str = "crate-metadata.json";
pub const TABLE_MAGIC: &[u8; 4] = b"HTBL";
pub const TABLE_VERSION: u32 = 1;
pub const TABLE_HEADER_LEN: usize = 24;
pub const TABLE_ROW_LEN: usize = 24;
const FORMAT_NAME: &str = "halcyon-feature-crate";

/// Per-layer summary kept in the manifest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LayerSummary {
    pub name: String,
    /// Distinct class code URIs, sorted.
    pub class_codes: Vec<String>,
    pub polygon_count: u64,
    pub level_count: u32,
    pub drop_threshold: u64,
}

impl LayerSummary {
    pub fn describe(name: &str, pyramid: &FeaturePyramid) -> Self {
        let base = pyramid.base();
        let mut class_codes: Vec<String> =
            base.polygon_ids().map(|id| base.meta(id).unwrap().class_code.clone()).collect();
        class_codes.sort();
        class_codes.dedup();
        LayerSummary {
            name: name.to_string(),
            class_codes,
            polygon_count: base.polygon_count() as u64,
            level_count: pyramid.level_count() as u32,
            drop_threshold: pyramid.drop_threshold(),
        }
    }
}

/// Dataset description. Field names follow the schema.org and EXIF terms
/// used to describe feature datasets (`name`, `datePublished`, `width`, ...).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Manifest {
    #[serde(default = "format_name")]
    pub format: String,
    #[serde(default = "format_version")]
    pub version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub creator: String,
    /// ISO-8601 timestamp text.
    #[serde(default)]
    pub date_published: String,
    #[serde(default)]
    pub license: String,
    #[serde(default)]
    pub keywords: Vec<String>,
    /// Source image width in pixels.
    pub width: u64,
    /// Source image height in pixels.
    pub height: u64,
    pub base_order: u8,
    #[serde(default)]
    pub layers: Vec<LayerSummary>,
}

fn format_name() -> String {
    FORMAT_NAME.to_string()
}

fn format_version() -> u32 {
    1
}

impl Manifest {
    /// Manifest for an image, with the base order derived from its size.
    pub fn new(name: impl Into<String>, width: u64, height: u64) -> Result<Self> {
        let order = CurveOrder::for_image(width, height)?;
        Ok(Manifest {
            format: format_name(),
            version: format_version(),
            name: name.into(),
            description: String::new(),
            creator: String::new(),
            date_published: String::new(),
            license: String::new(),
            keywords: Vec::new(),
            width,
            height,
            base_order: order.get(),
            layers: Vec::new(),
        })
    }

    pub fn base_order(&self) -> Result<CurveOrder> {
        CurveOrder::new(self.base_order)
    }

    /// Replaces the layer list with summaries of `pyramids`.
    pub fn describe_layers(&mut self, pyramids: &BTreeMap<String, FeaturePyramid>) {
        self.layers = pyramids.iter().map(|(name, p)| LayerSummary::describe(name, p)).collect();
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Validation(format!("image size {}x{} is empty", self.width, self.height)));
        }
        let order = self.base_order()?;
        if order.side() < self.width.max(self.height) {
            return Err(Error::Validation(format!(
                "base order {} (side {}) cannot hold a {}x{} image",
                order,
                order.side(),
                self.width,
                self.height
            )));
        }
        for layer in &self.layers {
            validate_layer_name(&layer.name)?;
        }
        Ok(())
    }

    /// Checks the manifest against the pyramids it describes.
    pub fn validate_against(&self, pyramids: &BTreeMap<String, FeaturePyramid>) -> Result<()> {
        self.validate()?;
        let listed: Vec<&str> = self.layers.iter().map(|l| l.name.as_str()).collect();
        let present: Vec<&str> = pyramids.keys().map(String::as_str).collect();
        let mut sorted = listed.clone();
        sorted.sort_unstable();
        if sorted != present {
            return Err(Error::Validation(format!("manifest lists layers {listed:?}, data has {present:?}")));
        }
        for layer in &self.layers {
            let pyramid = &pyramids[&layer.name];
            if pyramid.base_order().get() != self.base_order {
                return Err(Error::Validation(format!(
                    "layer {} has base order {}, manifest says {}",
                    layer.name,
                    pyramid.base_order(),
                    self.base_order
                )));
            }
            if *layer != LayerSummary::describe(&layer.name, pyramid) {
                return Err(Error::Validation(format!("summary of layer {} does not match its data", layer.name)));
            }
        }
        Ok(())
    }
}

fn validate_layer_name(name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && name != "."
        && name != ".."
        && !name.contains(['/', '\\'])
        && !name.chars().any(char::is_control);
    if ok {
        Ok(())
    } else {
        Err(Error::Validation(format!("invalid layer name {name:?}")))
    }
}

/// A dataset read back from a container.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub manifest: Manifest,
    pub layers: BTreeMap<String, FeaturePyramid>,
    /// Non-fatal findings, such as unrecognised entries.
    pub warnings: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct SidecarRow {
    id: PolygonId,
    class: String,
    certainty: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

/// Serializes one table in the `.htbl` layout.
pub fn encode_table(table: &FeatureTable) -> Vec<u8> {
    let mut out = Vec::with_capacity(TABLE_HEADER_LEN + TABLE_ROW_LEN * table.row_count());
    out.extend_from_slice(TABLE_MAGIC);
    out.extend_from_slice(&TABLE_VERSION.to_le_bytes());
    out.push(table.order().get());
    out.extend_from_slice(&[0u8; 7]);
    out.extend_from_slice(&(table.row_count() as u64).to_le_bytes());
    for (start, end, id) in table.rows() {
        out.extend_from_slice(&start.to_le_bytes());
        out.extend_from_slice(&end.to_le_bytes());
        out.extend_from_slice(&id.to_le_bytes());
    }
    out
}

fn u64_at(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap())
}

/// Decodes a `.htbl` entry, attaching sidecar metadata for the ids it holds.
pub fn decode_table(entry: &str, bytes: &[u8], sidecar: &BTreeMap<PolygonId, PolygonMeta>) -> Result<FeatureTable> {
    let corrupt = |message: String| Error::Corruption { entry: entry.to_string(), message };
    if bytes.len() < 4 || &bytes[..4] != TABLE_MAGIC {
        return Err(Error::UnsupportedFormat { entry: entry.to_string(), message: "bad magic".into() });
    }
    if bytes.len() < TABLE_HEADER_LEN {
        return Err(corrupt(format!("header truncated to {} bytes", bytes.len())));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != TABLE_VERSION {
        return Err(Error::UnsupportedFormat { entry: entry.to_string(), message: format!("version {version}") });
    }
    let order = CurveOrder::new(bytes[8]).map_err(|_| corrupt(format!("curve order {}", bytes[8])))?;
    let rows = u64_at(bytes, 16);
    let body = (bytes.len() - TABLE_HEADER_LEN) as u64;
    if rows.checked_mul(TABLE_ROW_LEN as u64) != Some(body) {
        return Err(corrupt(format!("header declares {rows} rows but body holds {body} bytes")));
    }
    let mut out = Vec::with_capacity(rows as usize);
    let mut present = BTreeMap::new();
    for i in 0..rows as usize {
        let at = TABLE_HEADER_LEN + i * TABLE_ROW_LEN;
        let row = (u64_at(bytes, at), u64_at(bytes, at + 8), u64_at(bytes, at + 16));
        if let Some(&(prev, _, _)) = out.last() {
            if prev > row.0 {
                return Err(corrupt(format!("row {i} is out of start order")));
            }
        }
        let meta = sidecar
            .get(&row.2)
            .ok_or_else(|| corrupt(format!("row {i} references polygon {} missing from the sidecar", row.2)))?;
        present.entry(row.2).or_insert_with(|| meta.clone());
        out.push(row);
    }
    FeatureTable::from_rows(order, out, present).map_err(|e| corrupt(e.to_string()))
}

fn level_entry(layer: &str, k: usize) -> String {
    format!("layers/{layer}/level-{k}.htbl")
}

fn sidecar_entry(layer: &str) -> String {
    format!("layers/{layer}/polygons.json")
}

/// Archive bytes for a dataset. Entry order and timestamps are fixed, so equal
/// inputs give byte-identical archives.
pub fn write_crate_bytes(manifest: &Manifest, pyramids: &BTreeMap<String, FeaturePyramid>) -> Result<Vec<u8>> {
    manifest.validate_against(pyramids)?;
    let options = SimpleFileOptions::default()
        .compression_method(CompressionMethod::Deflated)
        .last_modified_time(DateTime::default())
        .unix_permissions(0o644);
    let mut zip = ZipWriter::new(Cursor::new(Vec::new()));

    zip.start_file(METADATA_ENTRY, options)?;
    zip.write_all(&serde_json::to_vec_pretty(manifest)?)?;

    for layer in &manifest.layers {
        let pyramid = &pyramids[&layer.name];
        let base = pyramid.base();
        let rows: Vec<SidecarRow> = base
            .polygon_ids()
            .map(|id| {
                let meta = base.meta(id).unwrap();
                SidecarRow { id, class: meta.class_code.clone(), certainty: meta.certainty, name: meta.name.clone() }
            })
            .collect();
        zip.start_file(sidecar_entry(&layer.name), options)?;
        zip.write_all(&serde_json::to_vec_pretty(&rows)?)?;
        for (k, table) in pyramid.levels().iter().enumerate() {
            zip.start_file(level_entry(&layer.name, k), options)?;
            zip.write_all(&encode_table(table))?;
        }
    }
    Ok(zip.finish()?.into_inner())
}

pub fn write_crate(
    path: impl AsRef<Path>,
    manifest: &Manifest,
    pyramids: &BTreeMap<String, FeaturePyramid>,
) -> Result<()> {
    let bytes = write_crate_bytes(manifest, pyramids)?;
    std::fs::write(path, bytes)?;
    Ok(())
}

fn read_entry<R: Read + std::io::Seek>(zip: &mut ZipArchive<R>, name: &str) -> Result<Vec<u8>> {
    let mut file = zip.by_name(name).map_err(|e| match e {
        zip::result::ZipError::FileNotFound => {
            Error::Corruption { entry: name.to_string(), message: "entry missing".into() }
        }
        other => other.into(),
    })?;
    let mut buf = Vec::with_capacity(file.size() as usize);
    file.read_to_end(&mut buf).map_err(|e| Error::Corruption { entry: name.to_string(), message: e.to_string() })?;
    Ok(buf)
}

/// Reads a dataset from archive bytes.
pub fn read_crate_bytes(bytes: &[u8]) -> Result<Dataset> {
    let mut zip = ZipArchive::new(Cursor::new(bytes))?;
    let manifest: Manifest = serde_json::from_slice(&read_entry(&mut zip, METADATA_ENTRY)?)
        .map_err(|e| Error::Corruption { entry: METADATA_ENTRY.to_string(), message: e.to_string() })?;
    if manifest.format != FORMAT_NAME || manifest.version != 1 {
        return Err(Error::UnsupportedFormat {
            entry: METADATA_ENTRY.to_string(),
            message: format!("{} version {}", manifest.format, manifest.version),
        });
    }
    manifest.validate()?;

    let mut expected = vec![METADATA_ENTRY.to_string()];
    let mut layers = BTreeMap::new();
    for layer in &manifest.layers {
        let name = sidecar_entry(&layer.name);
        let rows: Vec<SidecarRow> = serde_json::from_slice(&read_entry(&mut zip, &name)?)
            .map_err(|e| Error::Corruption { entry: name.clone(), message: e.to_string() })?;
        expected.push(name.clone());
        let mut sidecar = BTreeMap::new();
        for row in rows {
            let meta = PolygonMeta { class_code: row.class, certainty: row.certainty, name: row.name };
            if sidecar.insert(row.id, meta).is_some() {
                return Err(Error::Corruption { entry: name, message: format!("duplicate polygon {}", row.id) });
            }
        }
        let mut levels = Vec::with_capacity(layer.level_count as usize);
        for k in 0..layer.level_count as usize {
            let entry = level_entry(&layer.name, k);
            let table = decode_table(&entry, &read_entry(&mut zip, &entry)?, &sidecar)?;
            expected.push(entry);
            levels.push(table);
        }
        if levels.first().is_some_and(|base| base.polygon_count() != sidecar.len()) {
            return Err(Error::Corruption {
                entry: level_entry(&layer.name, 0),
                message: "base level does not cover every sidecar polygon".into(),
            });
        }
        let pyramid = FeaturePyramid::from_levels(layer.drop_threshold, levels)
            .map_err(|e| Error::Corruption { entry: format!("layers/{}", layer.name), message: e.to_string() })?;
        layers.insert(layer.name.clone(), pyramid);
    }
    manifest.validate_against(&layers)?;

    let mut warnings = Vec::new();
    for name in zip.file_names() {
        if !expected.iter().any(|e| e == name) && !name.ends_with('/') {
            warnings.push(format!("ignoring unrecognised entry {name}"));
        }
    }
    warnings.sort();
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(Dataset { manifest, layers, warnings })
}

pub fn read_crate(path: impl AsRef<Path>) -> Result<Dataset> {
    read_crate_bytes(&std::fs::read(path)?)
}
