use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use halcyon_core::codec::{polygon_to_hilbert, HilbertPolygon, Rect};
use halcyon_core::geometry::{parse_records, PolygonRecord};
use halcyon_core::pyramid::{build_pyramid, FeaturePyramid};
use halcyon_core::store::{read_crate, write_crate, Dataset, Manifest};
use halcyon_core::synth::{generate_nuclei, NucleiParams};
use halcyon_core::tile::{feature_response, parse_tile_url, LayerStyle};
use halcyon_core::{CurveOrder, Error, StatsReport};
use rayon::prelude::*;
use serde_json::json;

use crate::{CliError, ExitKind, IngestArgs, QueryArgs, QueryFormat, RenderArgs, ServeArgs, StatsArgs, SynthArgs};

/// Class code given to records that carry none, unless `--class` says
/// otherwise (SNOMED CT "nucleus").
pub const DEFAULT_CLASS: &str = "http://snomed.info/id/4421005";

/// Coarsest default pyramid order: 256 x 256 cells.
const DEFAULT_MIN_ORDER: u8 = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct IngestSummary {
    pub manifest: Manifest,
    /// Records that could not be read (lenient mode only).
    pub skipped: usize,
    /// Records whose polygon covers no cell centre.
    pub empty: usize,
}

impl fmt::Display for IngestSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.manifest;
        write!(f, "{} ({}x{}, base order {})", m.name, m.width, m.height, m.base_order)?;
        for l in &m.layers {
            write!(f, "\n  layer {}: {} polygons, {} levels", l.name, l.polygon_count, l.level_count)?;
        }
        if self.skipped > 0 {
            write!(f, "\n  skipped {} unreadable records", self.skipped)?;
        }
        if self.empty > 0 {
            write!(f, "\n  skipped {} polygons that cover no cell", self.empty)?;
        }
        Ok(())
    }
}

struct Located {
    file: String,
    line: usize,
    record: PolygonRecord<f64>,
}

fn read_inputs(args: &IngestArgs) -> Result<(Vec<Located>, usize), CliError> {
    let mut records = Vec::new();
    let mut problems = Vec::new();
    for path in &args.inputs {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new(ExitKind::Io, format!("{}: {e}", path.display())))?;
        for (line, parsed) in parse_records::<f64>(&text) {
            match parsed {
                Ok(record) => records.push(Located { file: path.display().to_string(), line, record }),
                Err(e) => problems.push((path.display().to_string(), line, e)),
            }
        }
    }
    if !problems.is_empty() && !args.lenient {
        let kind = problems.iter().map(|(_, _, e)| crate::kind_of(e)).min_by_key(|k| *k as u8).unwrap();
        let listing: Vec<String> = problems.iter().map(|(f, l, e)| format!("{f}:{l}: {e}")).collect();
        return Err(CliError::new(kind, listing.join("\n")));
    }
    for (f, l, e) in &problems {
        log::warn!("skipping {f}:{l}: {e}");
    }
    Ok((records, problems.len()))
}

fn default_min_order(base: CurveOrder) -> u8 {
    base.get().min(DEFAULT_MIN_ORDER)
}

/// Parses, encodes and writes one layer. Ids are assigned 1, 2, 3, ... in
/// input order (files in argument order, records in file order), so the
/// archive does not depend on how the encoding work was scheduled.
pub fn cmd_ingest(args: &IngestArgs) -> Result<IngestSummary, CliError> {
    let name = args.name.clone().unwrap_or_else(|| {
        args.output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "features".into())
    });
    let mut manifest = Manifest::new(name, args.width, args.height)?;
    manifest.description = args.description.clone();
    manifest.creator = args.creator.clone();
    manifest.license = args.license.clone();
    manifest.date_published = args.date_published.clone();
    manifest.keywords = args.keywords.clone();
    let order = manifest.base_order()?;
    let min_order = args.min_order.unwrap_or_else(|| default_min_order(order));

    let (records, skipped) = read_inputs(args)?;
    let encoded: Vec<Result<HilbertPolygon, (String, usize, Error)>> = records
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let class = r.record.class_code.as_deref().unwrap_or(&args.class_code);
            let certainty = r.record.certainty.unwrap_or(1.0);
            polygon_to_hilbert(&r.record.polygon, order, i as u64 + 1, class, certainty)
                .map_err(|e| (r.file.clone(), r.line, e))
        })
        .collect();

    let mut polygons = Vec::with_capacity(encoded.len());
    let mut empty = 0;
    for item in encoded {
        match item {
            Ok(p) => polygons.push(p),
            Err((f, l, Error::EmptyGeometry(_))) => {
                log::warn!("{f}:{l}: polygon covers no cell centre at order {order}; skipped");
                empty += 1;
            }
            Err((f, l, e)) if args.lenient => {
                log::warn!("skipping {f}:{l}: {e}");
            }
            Err((f, l, e)) => return Err(CliError::new(crate::kind_of(&e), format!("{f}:{l}: {e}"))),
        }
    }
    if polygons.is_empty() && !args.lenient {
        return Err(CliError::new(ExitKind::Validation, "no polygons in the input"));
    }

    let pyramid = build_pyramid(order, polygons, min_order, args.drop_threshold)?;
    let mut pyramids = BTreeMap::new();
    pyramids.insert(args.layer.clone(), pyramid);
    manifest.describe_layers(&pyramids);
    write_crate(&args.output, &manifest, &pyramids)?;
    Ok(IngestSummary { manifest, skipped, empty })
}

fn open(path: &Path) -> Result<Dataset, CliError> {
    let dataset =
        read_crate(path).map_err(|e| CliError::new(crate::kind_of(&e), format!("{}: {e}", path.display())))?;
    for w in &dataset.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(dataset)
}

fn layer<'a>(dataset: &'a Dataset, name: &str) -> Result<&'a FeaturePyramid, CliError> {
    dataset.layers.get(name).ok_or_else(|| {
        let known: Vec<&str> = dataset.layers.keys().map(String::as_str).collect();
        CliError::new(ExitKind::Validation, format!("no layer named {name} (layers: {})", known.join(", ")))
    })
}

pub fn cmd_stats(args: &StatsArgs) -> Result<String, CliError> {
    let dataset = open(&args.crate_path)?;
    let names: Vec<&String> = match &args.layer {
        Some(name) => {
            layer(&dataset, name)?;
            vec![name]
        }
        None => dataset.layers.keys().collect(),
    };
    let reports: Vec<(&String, StatsReport)> =
        names.into_iter().map(|n| (n, StatsReport::compute(dataset.layers[n].base()))).collect();
    if args.json {
        let v: serde_json::Map<String, serde_json::Value> =
            reports.iter().map(|(n, r)| (n.to_string(), serde_json::to_value(r).unwrap())).collect();
        return Ok(serde_json::to_string_pretty(&v).map_err(Error::from)? + "\n");
    }
    Ok(reports.iter().map(|(n, r)| format!("layer: {n}\n{r}\n")).collect::<Vec<_>>().join("\n"))
}

fn parse_region(text: &str) -> Result<(u64, u64, u64, u64), CliError> {
    let parts: Vec<Result<u64, _>> = text.split(',').map(|p| p.trim().parse::<u64>()).collect();
    match parts.as_slice() {
        [Ok(x), Ok(y), Ok(w), Ok(h)] if *w > 0 && *h > 0 => Ok((*x, *y, *w, *h)),
        _ => Err(CliError::new(ExitKind::Usage, format!("region '{text}' must be x,y,w,h with w,h > 0"))),
    }
}

/// Level-0 query. CSV columns are `id,class,certainty,rangeCount`, where
/// `rangeCount` is the polygon's total number of Hilbert ranges.
pub fn cmd_query(args: &QueryArgs) -> Result<String, CliError> {
    let dataset = open(&args.crate_path)?;
    let pyramid = layer(&dataset, &args.layer)?;
    let (width, height) = (dataset.manifest.width, dataset.manifest.height);
    let (x, y, w, h) = match &args.region {
        Some(text) => parse_region(text)?,
        None => (0, 0, width, height),
    };
    if x.checked_add(w).is_none_or(|e| e > width) || y.checked_add(h).is_none_or(|e| e > height) {
        return Err(CliError::new(
            ExitKind::Validation,
            format!("region {x},{y},{w},{h} is not within the {width}x{height} image"),
        ));
    }
    let rect = Rect::from_region(x, y, w, h)?;
    let table = pyramid.base();
    let result = pyramid.query(&rect, 0)?;
    let rows = result.ids.iter().map(|&id| {
        let meta = table.meta(id).expect("query ids come from the table");
        let ranges = table.intervals(id).expect("query ids come from the table");
        (id, meta, ranges)
    });
    Ok(match args.format {
        QueryFormat::Ids => result.ids.iter().map(|id| format!("{id}\n")).collect(),
        QueryFormat::Json => {
            let items: Vec<_> = rows
                .map(|(id, meta, ranges)| {
                    json!({
                        "id": id,
                        "class": meta.class_code,
                        "certainty": meta.certainty,
                        "rangeCount": ranges.len(),
                        "matched": result.matched[&id],
                    })
                })
                .collect();
            serde_json::to_string_pretty(&items).map_err(Error::from)? + "\n"
        }
        QueryFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::new(ExitKind::Io, e.to_string());
            w.write_record(["id", "class", "certainty", "rangeCount"]).map_err(io)?;
            for (id, meta, ranges) in rows {
                w.write_record([
                    id.to_string(),
                    meta.class_code.clone(),
                    meta.certainty.to_string(),
                    ranges.len().to_string(),
                ])
                .map_err(io)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| CliError::new(ExitKind::Io, e.to_string()))?)
                .expect("csv of utf-8 fields")
        }
    })
}

/// Tile bytes for a request, with the same defaults the service uses.
pub fn cmd_render(args: &RenderArgs) -> Result<Vec<u8>, CliError> {
    let text = args.request.trim();
    let text = text.strip_prefix("/iiif/").or_else(|| text.strip_prefix("iiif/")).unwrap_or(text);
    let req = parse_tile_url(text).map_err(|e| CliError::new(ExitKind::Usage, e.to_string()))?;
    let dataset = open(&args.crate_path)?;
    let pyramid = layer(&dataset, &args.layer)?;
    let style = match &args.style {
        Some(path) => LayerStyle::load(path)?,
        None => {
            let summary = dataset.manifest.layers.iter().find(|l| l.name == args.layer);
            LayerStyle::enumerate(summary.into_iter().flat_map(|l| l.class_codes.iter().map(String::as_str)))?
        }
    };
    Ok(feature_response(pyramid, &style, &req)?)
}

pub fn cmd_serve(args: &ServeArgs) -> Result<(), CliError> {
    let mut config = halcyon_service::Config::load(&args.config)?;
    if let Some(bind) = &args.bind {
        config.bind = bind.clone();
    }
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(halcyon_service::serve(config))?;
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<String, CliError> {
    let params = NucleiParams {
        min_radius: args.min_radius,
        max_radius: args.max_radius,
        jitter: args.jitter,
        vertices: args.vertices,
        ..NucleiParams::new(args.width, args.height, args.count, args.seed)
    };
    let nuclei = generate_nuclei(&params)?;
    let mut text = String::with_capacity(nuclei.len() * 600);
    for n in &nuclei {
        text.push_str(&n.to_record_line());
        text.push('\n');
    }
    Ok(text)
}
