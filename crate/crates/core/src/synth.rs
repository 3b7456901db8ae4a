//! Synthetic nuclei: jittered ellipses scattered over an image, for
//! benchmarks and fixtures.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{to_wkt, Point, Ring, VertexPolygon};

pub const NUCLEUS_CLASS: &str = "http://snomed.info/id/4421005";

#[derive(Clone, Debug)]
pub struct NucleiParams {
    pub width: u64,
    pub height: u64,
    pub count: usize,
    /// Semi-axis range in pixels.
    pub min_radius: f64,
    pub max_radius: f64,
    /// Relative radial noise per vertex, in `[0, 1)`.
    pub jitter: f64,
    pub vertices: usize,
    pub seed: u64,
    pub class_code: String,
}

impl NucleiParams {
    pub fn new(width: u64, height: u64, count: usize, seed: u64) -> Self {
        NucleiParams {
            width,
            height,
            count,
            min_radius: 4.0,
            max_radius: 12.0,
            jitter: 0.15,
            vertices: 24,
            seed,
            class_code: NUCLEUS_CLASS.to_string(),
        }
    }

    fn validate(&self) -> Result<()> {
        let span = 2.0 * self.max_radius * (1.0 + self.jitter);
        if !(self.min_radius >= 1.0 && self.min_radius <= self.max_radius) {
            return Err(Error::Validation(format!("radius range {}..{} invalid", self.min_radius, self.max_radius)));
        }
        if !(0.0..1.0).contains(&self.jitter) {
            return Err(Error::Validation(format!("jitter {} outside [0, 1)", self.jitter)));
        }
        if self.vertices < 3 {
            return Err(Error::Validation("a nucleus needs at least 3 vertices".into()));
        }
        if (self.width as f64) < span || (self.height as f64) < span {
            return Err(Error::Validation(format!("{}x{} image too small for the radii", self.width, self.height)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Nucleus {
    pub polygon: VertexPolygon<f64>,
    pub class_code: String,
    pub certainty: f64,
}

impl Nucleus {
    /// `wkt \t class \t certainty`, the line-delimited ingest form.
    pub fn to_record_line(&self) -> String {
        format!("{}\t{}\t{}", to_wkt(&self.polygon), self.class_code, self.certainty)
    }
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// Deterministic for a given parameter set.
pub fn generate_nuclei(params: &NucleiParams) -> Result<Vec<Nucleus>> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let reach = params.max_radius * (1.0 + params.jitter);
    let mut out = Vec::with_capacity(params.count);
    while out.len() < params.count {
        let cx = rng.gen_range(reach..=params.width as f64 - reach);
        let cy = rng.gen_range(reach..=params.height as f64 - reach);
        let a = rng.gen_range(params.min_radius..=params.max_radius);
        let b = rng.gen_range(params.min_radius..=params.max_radius);
        let theta = rng.gen_range(0.0..TAU);
        let (s, c) = theta.sin_cos();
        let vertices: Vec<Point<f64>> = (0..params.vertices)
            .map(|i| {
                let t = TAU * i as f64 / params.vertices as f64;
                let r = 1.0 + rng.gen_range(-params.jitter..=params.jitter);
                let (ex, ey) = (a * r * t.cos(), b * r * t.sin());
                Point::new(round2(cx + ex * c - ey * s), round2(cy + ex * s + ey * c))
            })
            .collect();
        let Ok(ring) = Ring::new(vertices) else { continue };
        let certainty = round2(rng.gen_range(0.5..=1.0));
        out.push(Nucleus {
            polygon: VertexPolygon::from_outer(ring),
            class_code: params.class_code.clone(),
            certainty,
        });
    }
    Ok(out)
}
