mod common;

use std::collections::BTreeSet;

use common::*;
use halcyon_core::codec::polygon_to_hilbert;
use halcyon_core::codec::HilbertPolygon;
use halcyon_core::hilbert::Cell;
use halcyon_core::pyramid::{build_pyramid, select_level};
use halcyon_core::tile::{
    feature_response, feature_tile_json, parse_tile_url, render_feature_tile, render_image_tile, serve_image_tile,
    Checkerboard, ImageSource, LayerStyle, TileRequest,
};
use rand::Rng;
use serde_json::Value;

struct Scene {
    /// Per polygon: id, class, certainty, base cells.
    polygons: Vec<(u64, String, f64, BTreeSet<Cell>)>,
    hilbert: Vec<HilbertPolygon>,
}

fn scene(rng: &mut impl Rng, n: u8, count: usize) -> Scene {
    let o = order(n);
    let mut polygons = Vec::new();
    let mut hilbert = Vec::new();
    while polygons.len() < count {
        let p = random_convex(rng, o);
        let cells = raster_oracle(&p, o);
        if cells.is_empty() {
            continue;
        }
        let id = rng.gen_range(1..1000);
        if polygons.iter().any(|q: &(u64, String, f64, BTreeSet<Cell>)| q.0 == id) {
            continue;
        }
        let class = format!("urn:class:{}", rng.gen_range(0..3));
        let certainty = rng.gen_range(0..=8) as f64 / 8.0;
        hilbert.push(polygon_to_hilbert(&p, o, id, &class, certainty).unwrap());
        polygons.push((id, class, certainty, cells));
    }
    Scene { polygons, hilbert }
}

/// Pixel-by-pixel rendering from raw cell sets: walk each polygon up `level`
/// parents, drop it if too small, pick the winner per sampled cell.
fn oracle_tile(scene: &Scene, style: &LayerStyle, threshold: u64, level: usize, req: &TileRequest) -> Vec<[u8; 4]> {
    let mut lifted: Vec<(u64, &str, f64, Option<BTreeSet<Cell>>)> = Vec::new();
    for (id, class, certainty, cells) in &scene.polygons {
        let mut current = Some(cells.clone());
        for _ in 0..level {
            current = current
                .map(|c| c.iter().map(|x| x.parent()).collect::<BTreeSet<_>>())
                .filter(|c| c.len() as u64 >= threshold);
        }
        lifted.push((*id, class, *certainty, current));
    }
    let r = &req.region;
    let mut out = Vec::new();
    for py in 0..req.out_h {
        for px in 0..req.out_w {
            // Pixel centre of output pixel mapped back to base pixels.
            let bx = r.x + ((2 * px + 1) * r.w) / (2 * req.out_w);
            let by = r.y + ((2 * py + 1) * r.h) / (2 * req.out_h);
            let cell = Cell::new(bx >> level, by >> level);
            let winner = lifted
                .iter()
                .filter(|(_, _, _, cells)| cells.as_ref().is_some_and(|c| c.contains(&cell)))
                .min_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then(a.0.cmp(&b.0)));
            out.push(match winner {
                Some((_, class, certainty, _)) => [style.red(class), (certainty * 255.0).round() as u8, 0, 255],
                None => [0, 0, 0, 0],
            });
        }
    }
    out
}

#[test]
fn feature_tiles_match_direct_raster() {
    let mut rng = rng(21);
    let style =
        LayerStyle::from_json(r#"{"classes": {"urn:class:0": 10, "urn:class:1": {"red": 20}}, "fallbackRed": 99}"#)
            .unwrap();
    for tile in 0..20 {
        let n = 7;
        let count = rng.gen_range(1..25);
        let sc = scene(&mut rng, n, count);
        let threshold = rng.gen_range(1..=3);
        let pyramid = build_pyramid(order(n), sc.hilbert.clone(), 1, threshold).unwrap();
        let side = 1u64 << n;
        let (x, y) = (rng.gen_range(0..side), rng.gen_range(0..side));
        let (w, h) = (rng.gen_range(1..=side + 20), rng.gen_range(1..=side + 20));
        let (ow, oh) = (rng.gen_range(1..=64), rng.gen_range(1..=64));
        let req = parse_tile_url(&format!("img/{x},{y},{w},{h}/{ow},{oh}/0/default.png")).unwrap();
        let level = select_level(&req.region.rect(), ow, oh, pyramid.max_level()).unwrap();

        let got = render_feature_tile(&pyramid, &style, &req).unwrap();
        let expected = oracle_tile(&sc, &style, threshold, level, &req);
        let pixels: Vec<[u8; 4]> = got.pixels().map(|p| p.0).collect();
        assert_eq!(pixels, expected, "tile {tile}: {req} at level {level}");
        // Channel invariants.
        for p in &pixels {
            assert!(p[3] == 0 || (p[3] == 255 && p[0] != 0 && p[2] == 0));
            assert!(p[3] == 255 || *p == [0, 0, 0, 0]);
        }
        let a = feature_response(&pyramid, &style, &req).unwrap();
        assert_eq!(a, feature_response(&pyramid, &style, &req).unwrap());
    }
}

#[test]
fn json_ids_equal_pyramid_query() {
    let mut rng = rng(22);
    for _ in 0..20 {
        let sc = scene(&mut rng, 6, 15);
        let pyramid = build_pyramid(order(6), sc.hilbert.clone(), 1, 2).unwrap();
        let (x, y) = (rng.gen_range(0..64), rng.gen_range(0..64));
        let req = parse_tile_url(&format!("img/{x},{y},32,32/{},{}/0/default.json", rng.gen_range(1..40), 16)).unwrap();
        let v: Value = serde_json::from_str(&feature_tile_json(&pyramid, &req).unwrap()).unwrap();
        let level = v["level"].as_u64().unwrap() as usize;
        let expected = pyramid.query(&req.region.rect(), level).unwrap().ids;
        let ids: Vec<u64> = v["polygons"].as_array().unwrap().iter().map(|p| p["id"].as_u64().unwrap()).collect();
        assert_eq!(ids, expected);
        for p in v["polygons"].as_array().unwrap() {
            for ring in p["rings"].as_array().unwrap() {
                let ring = ring.as_array().unwrap();
                assert_eq!(ring.first(), ring.last());
                for pt in ring {
                    assert_eq!(pt[0].as_u64().unwrap() % (1 << level), 0);
                }
            }
        }
    }
}

#[test]
fn checkerboard_tiles_match_closed_form() {
    let mut rng = rng(23);
    let board = Checkerboard::new(3000, 2000, 37);
    for _ in 0..30 {
        let (w, h) = (rng.gen_range(1..3000), rng.gen_range(1..2000));
        let (x, y) = (rng.gen_range(0..=3000 - w), rng.gen_range(0..=2000 - h));
        let (ow, oh) = (rng.gen_range(1..100), rng.gen_range(1..100));
        let req = parse_tile_url(&format!("b/{x},{y},{w},{h}/{ow},{oh}/0/default.png")).unwrap();
        let level = select_level(&req.region.rect(), ow, oh, board.level_count() - 1).unwrap();
        let img = render_image_tile(&board, &req).unwrap();
        for py in 0..oh {
            for px in 0..ow {
                let bx = x + ((2 * px + 1) * w) / (2 * ow);
                let by = y + ((2 * py + 1) * h) / (2 * oh);
                // Level pixel's upper-left base pixel decides the colour.
                let (lx, ly) = ((bx >> level) << level, (by >> level) << level);
                let dark = (lx / 37 + ly / 37) % 2 == 1;
                let expected = if dark { Checkerboard::DARK } else { Checkerboard::LIGHT };
                assert_eq!(*img.get_pixel(px as u32, py as u32), expected);
            }
        }
    }
}

#[test]
fn example_request_on_large_source() {
    let board = Checkerboard::new(131_072, 131_072, 512);
    let req = parse_tile_url("image.svs/25000,25000,10000,10000/512,512/0/default.jpg").unwrap();
    let bytes = serve_image_tile(&board, &req).unwrap();
    let img = image::load_from_memory(&bytes).unwrap();
    assert_eq!((img.width(), img.height()), (512, 512));
    assert!(serve_image_tile(&board, &parse_tile_url("i/131000,0,100,10/10,1/0/default.png").unwrap()).is_err());
}
