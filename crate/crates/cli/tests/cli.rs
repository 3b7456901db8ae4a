use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use halcyon_service::{router, AppState, Config};
use http_body_util::BodyExt;
use tower::ServiceExt;

const PENTAGONS: &str = "\
POLYGON ((10 10, 10 40, 30 50, 50 30, 40 10, 10 10))\turn:tumor\t0.9
POLYGON ((100 100, 180 100, 180 160, 100 160))\turn:stroma\t0.4
# a comment line

POLYGON ((200 20, 240 20, 220 60))
";

fn halcyon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halcyon")).args(args).output().unwrap()
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn ingest_fixture(dir: &Path) -> PathBuf {
    let input = dir.join("three.wkt");
    std::fs::write(&input, PENTAGONS).unwrap();
    let out = dir.join("three.zip");
    let args = ["ingest", p(&input), "--width", "256", "--height", "200", "--layer", "roi", "--min-order", "5"];
    ok(&halcyon(&[&args[..], &["-o", p(&out)]].concat()));
    out
}

#[test]
fn ingest_three_polygons() {
    let dir = tempfile::tempdir().unwrap();
    let path = ingest_fixture(dir.path());
    let dataset = halcyon_core::read_crate(&path).unwrap();
    let m = &dataset.manifest;
    assert_eq!((m.name.as_str(), m.width, m.height, m.base_order), ("three", 256, 200, 8));
    let pyramid = &dataset.layers["roi"];
    assert_eq!(pyramid.base().polygon_count(), 3);
    assert_eq!(pyramid.level_count(), 8 - 5 + 1);
    let meta = pyramid.base().meta(3).unwrap();
    assert_eq!((meta.class_code.as_str(), meta.certainty), (halcyon_cli::DEFAULT_CLASS, 1.0));
    assert_eq!(pyramid.base().meta(1).unwrap().class_code, "urn:tumor");
    assert_eq!(m.layers[0].class_codes, vec![halcyon_cli::DEFAULT_CLASS, "urn:stroma", "urn:tumor"]);
}

#[test]
fn ingest_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("n.tsv");
    ok(&halcyon(&["synth", "--width", "3000", "--height", "3000", "--count", "800", "--seed", "4", "-o", p(&input)]));
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_halcyon"))
            .env("RAYON_NUM_THREADS", threads)
            .args(["ingest", p(&input), "--width", "3000", "--height", "3000", "--name", "n", "-o", p(&out)])
            .output()
            .unwrap();
        ok(&status);
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.zip", "1"), run("b.zip", "8"));
}

#[test]
fn query_formats() {
    let dir = tempfile::tempdir().unwrap();
    let path = ingest_fixture(dir.path());
    let all = ok(&halcyon(&["query", p(&path), "--layer", "roi"]));
    assert_eq!(all, "1\n2\n3\n");
    let some = ok(&halcyon(&["query", p(&path), "--layer", "roi", "--region", "0,0,60,60"]));
    assert_eq!(some, "1\n");
    let none = halcyon(&["query", p(&path), "--layer", "roi", "--region", "60,60,10,10"]);
    assert_eq!(ok(&none), "");

    let csv = ok(&halcyon(&["query", p(&path), "--layer", "roi", "--region", "90,0,166,200", "--format", "csv"]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "id,class,certainty,rangeCount");
    assert!(lines[1].starts_with("2,urn:stroma,0.4,"));
    assert!(lines[2].starts_with(&format!("3,{},1,", halcyon_cli::DEFAULT_CLASS)));
    assert_eq!(lines.len(), 3);

    let json = ok(&halcyon(&["query", p(&path), "--layer", "roi", "--region", "0,0,60,60", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v[0]["id"], 1);
    assert_eq!(v[0]["class"], "urn:tumor");
}

#[test]
fn stats_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = ingest_fixture(dir.path());
    let text = ok(&halcyon(&["stats", p(&path)]));
    assert!(text.contains("polygonCount: 3"));
    assert!(text.contains("pointsPerPolygon: "));
    assert!(text.contains("rangesPerPolygon: "));
    let json = ok(&halcyon(&["stats", p(&path), "--json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["roi"]["polygonCount"], 3);
    assert_eq!(v["roi"]["baseOrder"], 8);
}

#[tokio::test]
async fn offline_render_equals_served_tile() {
    let dir = tempfile::tempdir().unwrap();
    let path = ingest_fixture(dir.path());
    let config = Config::from_json(&format!(
        r#"{{"images": [{{"id": "img", "source": {{"type": "checkerboard", "width": 256, "height": 200}}}}],
            "features": [{{"id": "roi", "image": "img", "crate": "{}", "layer": "roi"}}]}}"#,
        p(&path)
    ))
    .unwrap();
    let app = router(Arc::new(AppState::from_config(&config).unwrap()));
    for request in [
        "roi/0,0,256,200/128,100/0/default.png",
        "roi/5,5,70,70/70,70/0/default.png",
        "roi/0,0,256,200/64,50/0/default.json",
    ] {
        let out = dir.path().join("tile.bin");
        ok(&halcyon(&["render", p(&path), "--layer", "roi", "--request", request, "-o", p(&out)]));
        let offline = std::fs::read(&out).unwrap();
        let res =
            app.clone().oneshot(Request::get(format!("/iiif/{request}")).body(Body::empty()).unwrap()).await.unwrap();
        assert_eq!(res.status(), StatusCode::OK);
        let served = res.into_body().collect().await.unwrap().to_bytes();
        assert_eq!(offline, served.as_ref(), "{request}");
    }

    let out = dir.path().join("empty.png");
    ok(&halcyon(&[
        "render",
        p(&path),
        "--layer",
        "roi",
        "--request",
        "/iiif/roi/60,60,10,10/10,10/0/default.png",
        "-o",
        p(&out),
    ]));
    let img = image::open(&out).unwrap().to_rgba8();
    assert!(img.pixels().all(|px| px.0 == [0, 0, 0, 0]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = ingest_fixture(dir.path());
    let code = |out: Output| out.status.code().unwrap();
    let render = |req: &str| halcyon(&["render", p(&path), "--layer", "roi", "--request", req, "-o", "/dev/null"]);

    assert_eq!(code(halcyon(&["frobnicate"])), 2);
    assert_eq!(code(halcyon(&["stats"])), 2);
    assert_eq!(code(render("roi/0,0,10/10,10/0/default.png")), 2);
    assert_eq!(code(render("roi/0,0,10,10/10,10/90/default.png")), 2);

    let bad = dir.path().join("bad.wkt");
    std::fs::write(&bad, "POLYGON ((1 1, 5 1, 5 5))\nPOLYGON ((1 1, 5\n").unwrap();
    let out = halcyon(&["ingest", p(&bad), "--width", "10", "--height", "10", "-o", p(&dir.path().join("b.zip"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.wkt:2"));
    let lenient = halcyon(&[
        "ingest",
        p(&bad),
        "--width",
        "10",
        "--height",
        "10",
        "--lenient",
        "-o",
        p(&dir.path().join("b.zip")),
    ]);
    assert!(ok(&lenient).contains("skipped 1 unreadable records"));

    let empty = dir.path().join("empty.wkt");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(
        code(halcyon(&["ingest", p(&empty), "--width", "10", "--height", "10", "-o", p(&dir.path().join("e.zip"))])),
        5
    );
    assert_eq!(
        code(halcyon(&["ingest", "/nonexistent.wkt", "--width", "10", "--height", "10", "-o", "/tmp/x.zip"])),
        4
    );
    assert_eq!(code(halcyon(&["stats", "/nonexistent.zip"])), 4);
    assert_eq!(code(halcyon(&["query", p(&path), "--layer", "nope"])), 5);
    assert_eq!(code(halcyon(&["query", p(&path), "--layer", "roi", "--region", "250,0,10,10"])), 5);

    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"features": [{"id": "f", "image": "missing", "crate": "x.zip", "layer": "l"}]}"#).unwrap();
    assert_eq!(code(halcyon(&["serve", p(&cfg)])), 5);
    std::fs::write(&cfg, "{not json").unwrap();
    assert_ne!(code(halcyon(&["serve", p(&cfg)])), 0);
}

#[test]
fn synth_counts() {
    let text = ok(&halcyon(&["synth", "--width", "1000", "--height", "800", "--count", "25", "--seed", "3"]));
    assert_eq!(text.lines().count(), 25);
    assert_eq!(text, ok(&halcyon(&["synth", "--width", "1000", "--height", "800", "--count", "25", "--seed", "3"])));
}
