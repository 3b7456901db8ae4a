//! Immutable server state assembled from a config at startup.

use std::collections::BTreeMap;
use std::sync::Arc;

use halcyon_core::pyramid::FeaturePyramid;
use halcyon_core::store::read_crate_bytes;
use halcyon_core::tile::{Checkerboard, DirectoryPyramid, ImageSource, LayerStyle};
use sha2::{Digest, Sha256};

use crate::config::{Config, FeatureConfig, SourceConfig, StyleConfig};
use crate::error::{ServiceError, ServiceResult};

pub struct Image {
    pub source: Arc<dyn ImageSource>,
    /// Hash of the source description, the ETag seed for image tiles.
    pub digest: [u8; 32],
}

pub struct FeatureLayer {
    pub image: String,
    pub layer: String,
    pub pyramid: Arc<FeaturePyramid>,
    pub style: LayerStyle,
    pub class_codes: Vec<String>,
    /// Hash of the crate bytes, the ETag seed for feature tiles.
    pub digest: [u8; 32],
}

pub struct AppState {
    pub images: BTreeMap<String, Image>,
    pub features: BTreeMap<String, FeatureLayer>,
}

fn load_err(context: String) -> impl FnOnce(halcyon_core::Error) -> ServiceError {
    move |source| ServiceError::Load { context, source }
}

fn open_image(id: &str, source: &SourceConfig) -> ServiceResult<Image> {
    let digest: [u8; 32] = Sha256::digest(serde_json::to_vec(source).expect("config serializes")).into();
    let source: Arc<dyn ImageSource> = match source {
        SourceConfig::Directory { path } => {
            Arc::new(DirectoryPyramid::open(path).map_err(load_err(format!("image {id} ({})", path.display())))?)
        }
        SourceConfig::Checkerboard { width, height, square } => {
            if *width == 0 || *height == 0 {
                return Err(ServiceError::Config(format!("image {id}: checkerboard size must be positive")));
            }
            Arc::new(Checkerboard::new(*width, *height, *square))
        }
    };
    Ok(Image { source, digest })
}

fn open_feature(cfg: &FeatureConfig, image: &Image) -> ServiceResult<FeatureLayer> {
    let context = format!("feature {} ({})", cfg.id, cfg.crate_path.display());
    let bytes = std::fs::read(&cfg.crate_path).map_err(|e| load_err(context.clone())(e.into()))?;
    let digest: [u8; 32] = Sha256::digest(&bytes).into();
    let mut dataset = read_crate_bytes(&bytes).map_err(load_err(context.clone()))?;
    for w in &dataset.warnings {
        log::warn!("{context}: {w}");
    }
    let (width, height) = (dataset.manifest.width, dataset.manifest.height);
    if (width, height) != (image.source.width(), image.source.height()) {
        return Err(ServiceError::Config(format!(
            "{context}: crate is for a {width}x{height} image but {} is {}x{}",
            cfg.image,
            image.source.width(),
            image.source.height()
        )));
    }
    let pyramid = dataset
        .layers
        .remove(&cfg.layer)
        .ok_or_else(|| ServiceError::Config(format!("{context}: no layer named {}", cfg.layer)))?;
    let class_codes =
        dataset.manifest.layers.iter().find(|l| l.name == cfg.layer).map(|l| l.class_codes.clone()).unwrap_or_default();
    let style = match &cfg.style {
        None => LayerStyle::enumerate(class_codes.iter().map(String::as_str)),
        Some(StyleConfig::Path(p)) => LayerStyle::load(p),
        Some(StyleConfig::Inline(s)) => s.validate().map(|_| s.clone()),
    }
    .map_err(load_err(format!("{context}: style")))?;
    Ok(FeatureLayer {
        image: cfg.image.clone(),
        layer: cfg.layer.clone(),
        pyramid: Arc::new(pyramid),
        style,
        class_codes,
        digest,
    })
}

impl AppState {
    /// Opens every image and crate named by the config, failing on the first
    /// problem.
    pub fn from_config(config: &Config) -> ServiceResult<Self> {
        let mut images = BTreeMap::new();
        for cfg in &config.images {
            if images.insert(cfg.id.clone(), open_image(&cfg.id, &cfg.source)?).is_some() {
                return Err(ServiceError::Config(format!("duplicate image id {}", cfg.id)));
            }
        }
        let mut features = BTreeMap::new();
        for cfg in &config.features {
            if images.contains_key(&cfg.id) {
                return Err(ServiceError::Config(format!("feature id {} is also an image id", cfg.id)));
            }
            let image = images
                .get(&cfg.image)
                .ok_or_else(|| ServiceError::Config(format!("feature {} names unknown image {}", cfg.id, cfg.image)))?;
            if features.insert(cfg.id.clone(), open_feature(cfg, image)?).is_some() {
                return Err(ServiceError::Config(format!("duplicate feature id {}", cfg.id)));
            }
        }
        Ok(AppState { images, features })
    }
}
