//! Polygon payload for `.json` feature requests:
//!
//! ```json
//! {"image": "image.svs", "region": [x, y, w, h], "level": 2,
//!  "polygons": [{"id": 7, "class": "http://snomed.info/id/4421005",
//!                "certainty": 0.9, "rings": [[[x, y], ...]]}]}
//! ```
//!
//! Rings are traced at the selected level and scaled back to base-image
//! pixels; each ring is the closed outline of one connected piece.

use serde_json::{json, Value};

use super::request::TileRequest;
use crate::codec::hilbert_to_polygon;
use crate::error::Result;
use crate::pyramid::FeaturePyramid;

pub fn feature_tile_json(pyramid: &FeaturePyramid, req: &TileRequest) -> Result<String> {
    let region = req.region.rect();
    let level = pyramid.select_level(&region, req.out_w, req.out_h)?;
    let table = pyramid.level(level).expect("selected level exists");
    let result = pyramid.query(&region, level)?;
    let scale = 1u64 << level;

    let polygons: Vec<Value> = result
        .ids
        .iter()
        .map(|&id| {
            let polygon = table.polygon(id).expect("matched ids come from the table");
            let rings: Vec<Value> = hilbert_to_polygon::<f64>(&polygon)
                .iter()
                .map(|p| {
                    Value::Array(p.outer().closed().map(|v| json!([v.x as u64 * scale, v.y as u64 * scale])).collect())
                })
                .collect();
            json!({
                "id": id,
                "class": polygon.class_code,
                "certainty": polygon.certainty,
                "rings": rings,
            })
        })
        .collect();

    let r = &req.region;
    Ok(serde_json::to_string(&json!({
        "image": req.identifier,
        "region": [r.x, r.y, r.w, r.h],
        "level": level,
        "polygons": polygons,
    }))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{normalize, HilbertPolygon};
    use crate::hilbert::{xy_to_index, Cell, CurveOrder};
    use crate::pyramid::build_pyramid;
    use crate::tile::parse_tile_url;

    #[test]
    fn empty_region() {
        let p = build_pyramid(CurveOrder::new(5).unwrap(), vec![], 1, 1).unwrap();
        let text = feature_tile_json(&p, &parse_tile_url("img/0,0,8,8/8,8/0/default.json").unwrap()).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["polygons"], json!([]));
        assert_eq!(v["image"], "img");
        assert_eq!(v["region"], json!([0, 0, 8, 8]));
    }

    #[test]
    fn unit_cell_ring() {
        let o = CurveOrder::new(5).unwrap();
        let h = xy_to_index(o, Cell::new(3, 2)).unwrap();
        let poly = HilbertPolygon::new(11, "c", 0.5, normalize(o, [(h, h)]).unwrap()).unwrap();
        let p = build_pyramid(o, vec![poly], 1, 1).unwrap();
        let v: Value = serde_json::from_str(
            &feature_tile_json(&p, &parse_tile_url("img/0,0,8,8/8,8/0/default.json").unwrap()).unwrap(),
        )
        .unwrap();
        assert_eq!(v["level"], 0);
        assert_eq!(v["polygons"][0]["id"], 11);
        assert_eq!(v["polygons"][0]["rings"], json!([[[3, 2], [4, 2], [4, 3], [3, 3], [3, 2]]]));

        // At level 1 the parent cell (1,1) spans base pixels 2..4.
        let v: Value = serde_json::from_str(
            &feature_tile_json(&p, &parse_tile_url("img/0,0,8,8/4,4/0/default.json").unwrap()).unwrap(),
        )
        .unwrap();
        assert_eq!(v["level"], 1);
        assert_eq!(v["polygons"][0]["rings"], json!([[[2, 2], [4, 2], [4, 4], [2, 4], [2, 2]]]));
    }
}
