//! Service configuration file.
//!
//! ```json
//! {
//!   "bind": "127.0.0.1:8080",
//!   "images": [
//!     {"id": "slide-1", "source": {"type": "directory", "path": "tiles/slide-1"}},
//!     {"id": "demo", "source": {"type": "checkerboard", "width": 131072, "height": 131072, "square": 512}}
//!   ],
//!   "features": [
//!     {"id": "slide-1-nuclei", "image": "slide-1", "crate": "nuclei.zip", "layer": "nuclei",
//!      "style": {"classes": {"http://snomed.info/id/4421005": {"red": 1, "color": "#ff0000"}}}}
//!   ]
//! }
//! ```
//!
//! Relative paths are resolved against the directory holding the config file.
//! `style` may be an inline object or the path of a style file; when absent,
//! the crate's classes are numbered 1, 2, 3, ... in sorted order.

use std::path::{Path, PathBuf};

use halcyon_core::tile::LayerStyle;
use serde::{Deserialize, Serialize};

use crate::error::{ServiceError, ServiceResult};

pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

fn default_bind() -> String {
    DEFAULT_BIND.to_string()
}

fn default_square() -> u64 {
    256
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_bind")]
    pub bind: String,
    #[serde(default)]
    pub images: Vec<ImageConfig>,
    #[serde(default)]
    pub features: Vec<FeatureConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageConfig {
    pub id: String,
    pub source: SourceConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SourceConfig {
    Directory {
        path: PathBuf,
    },
    Checkerboard {
        width: u64,
        height: u64,
        #[serde(default = "default_square")]
        square: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StyleConfig {
    Path(PathBuf),
    Inline(LayerStyle),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureConfig {
    pub id: String,
    /// Image the features are drawn on.
    pub image: String,
    #[serde(rename = "crate")]
    pub crate_path: PathBuf,
    pub layer: String,
    #[serde(default)]
    pub style: Option<StyleConfig>,
}

fn resolve(base: &Path, path: &mut PathBuf) {
    if path.is_relative() {
        *path = base.join(&*path);
    }
}

impl Config {
    pub fn from_json(text: &str) -> ServiceResult<Self> {
        serde_json::from_str(text).map_err(|e| ServiceError::Config(e.to_string()))
    }

    /// Reads a config file and resolves its relative paths.
    pub fn load(path: impl AsRef<Path>) -> ServiceResult<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| ServiceError::Config(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_paths(base);
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        for image in &mut self.images {
            if let SourceConfig::Directory { path } = &mut image.source {
                resolve(base, path);
            }
        }
        for feature in &mut self.features {
            resolve(base, &mut feature.crate_path);
            if let Some(StyleConfig::Path(p)) = &mut feature.style {
                resolve(base, p);
            }
        }
    }
}
