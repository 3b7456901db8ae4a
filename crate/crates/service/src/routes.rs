//! HTTP routes.
//!
//! ```text
//! GET /iiif/{id}/info.json
//! GET /iiif/{id}/{region}/{size}/{rotation}/{quality}.{format}
//! ```
//!
//! `{id}` names either an image (jpg/png tiles) or a feature layer (png
//! feature tiles, json polygons).

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::header::{self, HeaderMap, HeaderValue};
use axum::http::{StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use halcyon_core::tile::{feature_response, parse_tile_url, serve_image_tile, ClassStyle, Format};
use halcyon_core::Error;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::state::{AppState, FeatureLayer};

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/iiif/{id}/info.json", get(info))
        .route("/iiif/{id}/{region}/{size}/{rotation}/{file}", get(tile))
        .with_state(state)
}

pub fn status_for(err: &Error) -> StatusCode {
    match err {
        Error::NotFound(_) => StatusCode::NOT_FOUND,
        Error::NotImplemented(_) => StatusCode::NOT_IMPLEMENTED,
        Error::BadRequest(_)
        | Error::Parse { .. }
        | Error::Domain(_)
        | Error::Validation(_)
        | Error::OrderMismatch { .. } => StatusCode::BAD_REQUEST,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

fn error_response(status: StatusCode, message: String) -> Response {
    if status.is_server_error() && status != StatusCode::NOT_IMPLEMENTED {
        log::error!("{message}");
    }
    let mut res = (status, axum::Json(json!({ "error": message }))).into_response();
    res.headers_mut().insert(header::ACCESS_CONTROL_ALLOW_ORIGIN, HeaderValue::from_static("*"));
    res
}

fn not_found(id: &str) -> Response {
    error_response(StatusCode::NOT_FOUND, format!("no image or feature layer named {id}"))
}

fn etag(seed: &[u8; 32], path: &str) -> String {
    let mut h = Sha256::new();
    h.update(seed);
    h.update(path.as_bytes());
    format!("\"{}\"", hex::encode(h.finalize()))
}

fn matches_etag(headers: &HeaderMap, tag: &str) -> bool {
    headers
        .get_all(header::IF_NONE_MATCH)
        .iter()
        .filter_map(|v| v.to_str().ok())
        .flat_map(|v| v.split(','))
        .map(str::trim)
        .any(|t| t == "*" || t == tag)
}

fn cached(headers: &HeaderMap, tag: String, content_type: &'static str, body: Vec<u8>) -> Response {
    let status = if matches_etag(headers, &tag) { StatusCode::NOT_MODIFIED } else { StatusCode::OK };
    let mut res = if status == StatusCode::OK { body.into_response() } else { status.into_response() };
    let h = res.headers_mut();
    if status == StatusCode::OK {
        h.insert(header::CONTENT_TYPE, HeaderValue::from_static(content_type));
    }
    h.insert(header::ETAG, HeaderValue::from_str(&tag).expect("hex etag"));
    h.insert(header::CACHE_CONTROL, HeaderValue::from_static("public, max-age=86400"));
    h.insert(header::ACCESS_CONTROL_ALLOW_ORIGIN, HeaderValue::from_static("*"));
    res
}

fn class_list(layer: &FeatureLayer) -> Vec<Value> {
    layer
        .class_codes
        .iter()
        .map(|code| {
            let color = match layer.style.classes.get(code) {
                Some(ClassStyle::Full { color: Some(c), .. }) => Some(c.clone()),
                _ => None,
            };
            json!({ "code": code, "red": layer.style.red(code), "color": color })
        })
        .collect()
}

fn feature_info(id: &str, f: &FeatureLayer) -> Value {
    json!({
        "id": id,
        "layer": f.layer,
        "baseOrder": f.pyramid.base_order().get(),
        "levels": f.pyramid.level_count(),
        "polygonCount": f.pyramid.base().polygon_count(),
        "classes": class_list(f),
    })
}

async fn info(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Response {
    let body = if let Some(image) = state.images.get(&id) {
        let s = &image.source;
        let sizes: Vec<Value> = (0..s.level_count())
            .map(|k| {
                let (w, h) = halcyon_core::tile::level_size(s.width(), s.height(), k);
                json!({ "width": w, "height": h })
            })
            .collect();
        let features: Vec<Value> =
            state.features.iter().filter(|(_, f)| f.image == id).map(|(fid, f)| feature_info(fid, f)).collect();
        json!({
            "id": id,
            "type": "image",
            "width": s.width(),
            "height": s.height(),
            "levels": s.level_count(),
            "sizes": sizes,
            "formats": ["jpg", "png"],
            "features": features,
        })
    } else if let Some(f) = state.features.get(&id) {
        let image = &state.images[&f.image].source;
        let mut v = feature_info(&id, f);
        v["type"] = json!("features");
        v["image"] = json!(f.image);
        v["width"] = json!(image.width());
        v["height"] = json!(image.height());
        v["formats"] = json!(["png", "json"]);
        v
    } else {
        return not_found(&id);
    };
    let mut res = axum::Json(body).into_response();
    res.headers_mut().insert(header::ACCESS_CONTROL_ALLOW_ORIGIN, HeaderValue::from_static("*"));
    res
}

async fn tile(
    State(state): State<Arc<AppState>>,
    Path((id, region, size, rotation, file)): Path<(String, String, String, String, String)>,
    uri: Uri,
    headers: HeaderMap,
) -> Response {
    let req = match parse_tile_url(&format!("{id}/{region}/{size}/{rotation}/{file}")) {
        Ok(r) => r,
        Err(e) => return error_response(status_for(&e), e.to_string()),
    };
    let is_image = state.images.contains_key(&id);
    if !is_image && !state.features.contains_key(&id) {
        return not_found(&id);
    }
    let seed = if is_image { state.images[&id].digest } else { state.features[&id].digest };
    let tag = etag(&seed, uri.path());
    if matches_etag(&headers, &tag) {
        return cached(&headers, tag, req.format.content_type(), Vec::new());
    }

    let content_type = req.format.content_type();
    let work = {
        let state = state.clone();
        move || {
            if let Some(image) = state.images.get(&req.identifier) {
                serve_image_tile(image.source.as_ref(), &req)
            } else {
                let f = &state.features[&req.identifier];
                if req.format == Format::Jpg {
                    return Err(Error::BadRequest("feature layers are served as png or json".into()));
                }
                feature_response(&f.pyramid, &f.style, &req)
            }
        }
    };
    match tokio::task::spawn_blocking(work).await {
        Ok(Ok(body)) => cached(&headers, tag, content_type, body),
        Ok(Err(e)) => error_response(status_for(&e), e.to_string()),
        Err(e) => error_response(StatusCode::INTERNAL_SERVER_ERROR, format!("render task failed: {e}")),
    }
}
