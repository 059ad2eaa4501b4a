//! File formats: JSON instances and certificates, CSV dot clouds.
//!
//! Doubles are written in their shortest round-trip decimal form, so a
//! parse of a written file reproduces every value bit for bit.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::chaos::ChaosCloud;
use crate::error::{Error, Result};
use crate::geometry::{Point, PointSet};
use crate::instances::{Instance, Truth};
use crate::solvers::{RunOutcome, SolverConfig, Status};

#[derive(Serialize)]
struct InstanceFile<'a> {
    m: usize,
    p: &'a [f64],
    #[serde(rename = "S")]
    s: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth: Option<Truth>,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

/// Serializes an instance as pretty-printed JSON with a trailing newline.
pub fn instance_to_json(inst: &Instance) -> String {
    let file = InstanceFile {
        m: inst.m(),
        p: inst.p.coords(),
        s: inst.points.to_rows(),
        truth: inst.truth,
        margin: inst.known_margin,
        rho: inst.known_rho,
        seed: inst.seed,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("instance serializes");
    text.push('\n');
    text
}

/// Parses an instance file, naming the offending key on failure.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::format("<root>", "expected a JSON object"))?;

    let m = obj
        .get("m")
        .ok_or_else(|| Error::format("m", "missing"))?
        .as_u64()
        .filter(|&m| m >= 1)
        .ok_or_else(|| Error::format("m", "must be a positive integer"))? as usize;

    let p = numbers(
        obj.get("p").ok_or_else(|| Error::format("p", "missing"))?,
        "p",
    )?;
    if p.len() != m {
        return Err(Error::format(
            "p",
            format!("has {} coordinates but m = {m}", p.len()),
        ));
    }

    let rows = obj
        .get("S")
        .ok_or_else(|| Error::format("S", "missing"))?
        .as_array()
        .ok_or_else(|| Error::format("S", "must be an array of points"))?;
    if rows.is_empty() {
        return Err(Error::format("S", "must contain at least one point"));
    }
    let mut s = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let key = format!("S[{i}]");
        let row = numbers(row, &key)?;
        if row.len() != m {
            return Err(Error::format(
                key,
                format!("has {} coordinates but m = {m}", row.len()),
            ));
        }
        s.push(row);
    }

    let truth = optional(obj, "truth", |v| {
        v.as_str()
            .ok_or("must be a string")
            .and_then(|t| t.parse::<Truth>().map_err(|_| "unknown truth value"))
    })?;
    let margin = optional(obj, "margin", |v| v.as_f64().ok_or("must be a number"))?;
    let rho = optional(obj, "rho", |v| v.as_f64().ok_or("must be a number"))?;
    let seed = optional(obj, "seed", |v| {
        v.as_u64().ok_or("must be a nonnegative integer")
    })?;

    let mut inst = Instance::new(PointSet::from_rows(s)?, Point::new(p)?)?;
    inst.truth = truth;
    inst.known_margin = margin;
    inst.known_rho = rho;
    inst.seed = seed;
    Ok(inst)
}

fn numbers(v: &Value, key: &str) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::format(key, "must be an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(j, x)| {
            x.as_f64()
                .ok_or_else(|| Error::format(format!("{key}[{j}]"), "must be a number"))
        })
        .collect()
}

fn optional<T>(
    obj: &Map<String, Value>,
    key: &str,
    get: impl Fn(&Value) -> std::result::Result<T, &'static str>,
) -> Result<Option<T>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => get(v).map(Some).map_err(|msg| Error::format(key, msg)),
    }
}

/// Parses a vertex list: either a bare array of points or an object whose
/// `S` key holds one.
pub fn parse_vertices(text: &str) -> Result<PointSet> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    let (rows, key) = match &root {
        Value::Array(rows) => (rows, "<root>"),
        Value::Object(obj) => (
            obj.get("S")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::format("S", "missing or not an array of points"))?,
            "S",
        ),
        _ => return Err(Error::format("<root>", "expected an array of points")),
    };
    if rows.is_empty() {
        return Err(Error::format(key, "must contain at least one point"));
    }
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| numbers(r, &format!("{key}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let dim = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != dim) {
        return Err(Error::format(
            format!("{key}[{i}]"),
            format!("has {} coordinates, expected {dim}", rows[i].len()),
        ));
    }
    PointSet::from_rows(rows)
}

/// Writes dots as CSV, one point per row, no header. Only marked dots unless
/// `all` is set.
pub fn write_cloud_csv<W: Write>(cloud: &ChaosCloud, all: bool, mut w: W) -> std::io::Result<()> {
    let skip = if all { 0 } else { cloud.burn_in() };
    let mut line = String::new();
    for dot in cloud.dots().skip(skip) {
        line.clear();
        for (j, x) in dot.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            let _ = write!(line, "{x:?}");
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()
}

/// The solve certificate: weights for an approximate solution, the witness
/// point and distance bounds for a separation.
pub fn certificate_json(out: &RunOutcome, cfg: &SolverConfig) -> Value {
    let mut obj = Map::new();
    obj.insert("status".into(), out.status.name().into());
    obj.insert("variant".into(), cfg.variant.name().into());
    obj.insert("pivot".into(), cfg.pivot_strategy.name().into());
    obj.insert("epsilon".into(), cfg.epsilon.into());
    obj.insert("seed".into(), cfg.seed.into());
    obj.insert("R".into(), out.radius.into());
    obj.insert("threshold".into(), out.threshold(cfg.epsilon).into());
    obj.insert("final_distance".into(), out.final_distance.into());
    obj.insert("iterations".into(), out.iterations.into());
    obj.insert("pivot_scans".into(), out.pivot_scans.into());
    obj.insert("point".into(), out.final_iterate.point().coords().into());
    match out.status {
        Status::Witness => {
            let (lo, hi) = out.gap_bounds.unwrap_or((f64::NAN, f64::NAN));
            obj.insert("witness".into(), out.final_iterate.point().coords().into());
            obj.insert("gap_bounds".into(), vec![lo, hi].into());
        }
        Status::Approximate | Status::IterLimit => {}
    }
    obj.insert("coeffs".into(), out.final_iterate.coeffs().into());
    if let Some(trace) = &out.trace {
        obj.insert(
            "trace".into(),
            serde_json::to_value(trace).expect("trace serializes"),
        );
    }
    Value::Object(obj)
}
