//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Points cross the boundary as flat `[x0, y0, x1, y1, ...]` arrays. The
//! plain Rust functions do the work; the exported wrappers only convert
//! errors, so everything here is testable natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use trihull::chaos::{random_start_cloud, sierpinski_cloud};
use trihull::geometry::PointSet;
use trihull::rng::{RngStream, STREAM_CHAOS};
use trihull::solvers::{Action, Target, TraceRecord};
use trihull::{solve, PivotStrategy, SolverConfig, Status, Variant};

/// Longest trace the demo will replay.
pub const MAX_DEMO_ITERS: u64 = 200_000;

fn planar(flat: &[f64]) -> Result<PointSet, String> {
    if flat.is_empty() || !flat.len().is_multiple_of(2) {
        return Err(format!("expected x,y pairs, got {} numbers", flat.len()));
    }
    PointSet::from_rows(flat.chunks(2).map(<[f64]>::to_vec).collect()).map_err(|e| e.to_string())
}

pub fn sierpinski_dots(steps: usize, burn_in: usize, seed: u64) -> Result<Vec<f64>, String> {
    let mut rng = RngStream::new(seed, STREAM_CHAOS);
    let cloud = sierpinski_cloud(steps, burn_in, &mut rng).map_err(|e| e.to_string())?;
    Ok(cloud.marked().flatten().copied().collect())
}

pub fn chaos_dots(
    vertices: &[f64],
    steps: usize,
    burn_in: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let s = planar(vertices)?;
    let mut rng = RngStream::new(seed, STREAM_CHAOS);
    let cloud = random_start_cloud(&s, steps, burn_in, &mut rng).map_err(|e| e.to_string())?;
    Ok(cloud.marked().flatten().copied().collect())
}

#[derive(Debug, Serialize)]
pub struct SolveView {
    pub status: Status,
    pub iterations: u64,
    pub pivot_scans: u64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub threshold: f64,
    pub final_distance: f64,
    pub final_point: Vec<f64>,
    pub gap_bounds: Option<(f64, f64)>,
    /// Iterates `p'` after each step, starting with the initial vertex.
    pub path: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn solve_view(
    vertices: &[f64],
    px: f64,
    py: f64,
    epsilon: f64,
    variant: &str,
    pivot: &str,
    seed: u64,
    max_iters: u64,
) -> Result<SolveView, String> {
    let s = planar(vertices)?;
    let variant: Variant = variant.parse().map_err(|e: trihull::Error| e.to_string())?;
    let pivot: PivotStrategy = pivot.parse().map_err(|e: trihull::Error| e.to_string())?;
    let cfg = SolverConfig::new(variant, epsilon)
        .with_pivot(pivot)
        .with_seed(seed)
        .with_max_iters(max_iters.clamp(1, MAX_DEMO_ITERS))
        .with_trace(true);
    cfg.validate().map_err(|e| e.to_string())?;
    let p = [px, py];
    let out = solve(&p, &s, &cfg).map_err(|e| e.to_string())?;
    let start = trihull::solvers::init_iterate(&p, &s).map_err(|e| e.to_string())?;
    let path = replay(
        &p,
        &s,
        start.point(),
        out.trace.as_deref().unwrap_or_default(),
    );
    Ok(SolveView {
        status: out.status,
        iterations: out.iterations,
        pivot_scans: out.pivot_scans,
        radius: out.radius,
        threshold: out.threshold(epsilon),
        final_distance: out.final_distance,
        final_point: out.final_iterate.point().to_vec(),
        gap_bounds: out.gap_bounds,
        path,
    })
}

/// Rebuilds the iterate positions from a trace. The incumbent moves exactly
/// when the recorded incumbent distance drops.
fn replay(p: &[f64], s: &PointSet, start: &[f64], trace: &[TraceRecord]) -> Vec<f64> {
    let mut cur = start.to_vec();
    let mut best = cur.clone();
    let mut best_d = trihull::geometry::squared_distance(p, start).map_or(f64::INFINITY, f64::sqrt);
    let mut path = cur.clone();
    for r in trace {
        if matches!(r.action, Action::JumpNearest | Action::JumpMidpoint) {
            cur.clone_from(&best);
        }
        let target = match r.target {
            Target::Vertex(i) => s.point(i).to_vec(),
            Target::Incumbent => best.clone(),
        };
        for (c, t) in cur.iter_mut().zip(&target) {
            *c += r.alpha * (t - *c);
        }
        if r.incumbent_distance < best_d {
            best_d = r.incumbent_distance;
            best.clone_from(&cur);
        }
        path.extend_from_slice(&cur);
    }
    path
}

#[wasm_bindgen]
pub fn sierpinski(steps: usize, burn_in: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    sierpinski_dots(steps, burn_in, seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn chaos(
    vertices: &[f64],
    steps: usize,
    burn_in: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    chaos_dots(vertices, steps, burn_in, seed.into()).map_err(|e| JsError::new(&e))
}

/// Solves a planar instance and returns the run as JSON.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn solve_planar(
    vertices: &[f64],
    px: f64,
    py: f64,
    epsilon: f64,
    variant: &str,
    pivot: &str,
    seed: u32,
    max_iters: u32,
) -> Result<String, JsError> {
    let view = solve_view(
        vertices,
        px,
        py,
        epsilon,
        variant,
        pivot,
        seed.into(),
        max_iters.into(),
    )
    .map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&view).map_err(|e| JsError::new(&e.to_string()))
}
