//! The general chaos game: repeatedly move halfway toward a uniformly chosen
//! vertex of `S` and record every landing point.
//!
//! With the three vertices of a triangle the recorded dots fill out the
//! Sierpinski triangle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{lerp_into, segment_alpha, sq_dist, PivotTest, Point, PointSet};
use crate::rng::RngStream;

/// Dots recorded before this many moves are kept but not marked.
pub const DEFAULT_BURN_IN: usize = 12;
/// Absolute tolerance of [`cell_address_check`].
pub const CELL_TOL: f64 = 1e-9;

/// The canonical unit-side equilateral triangle `{(0,0), (1,0), (1/2, √3/2)}`.
pub fn equilateral_triangle() -> PointSet {
    PointSet::from_rows(vec![
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![0.5, 3f64.sqrt() / 2.0],
    ])
    .expect("static triangle is valid")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosCloud {
    #[serde(with = "rows")]
    vertices: PointSet,
    seed_point: Point,
    /// Row-major, one dot per `dim` values.
    dots: Vec<f64>,
    choices: Vec<usize>,
    burn_in: usize,
}

impl ChaosCloud {
    /// Assembles a cloud from raw parts, checking only shapes.
    pub fn from_parts(
        vertices: PointSet,
        seed_point: Point,
        dots: Vec<Point>,
        choices: Vec<usize>,
        burn_in: usize,
    ) -> Result<Self> {
        vertices.check_dim(&seed_point)?;
        if dots.len() != choices.len() {
            return Err(Error::InvalidParameter(format!(
                "{} dots but {} choices",
                dots.len(),
                choices.len()
            )));
        }
        if let Some(&bad) = choices.iter().find(|&&c| c >= vertices.len()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: vertices.len(),
            });
        }
        let mut flat = Vec::with_capacity(dots.len() * vertices.dim());
        for d in &dots {
            vertices.check_dim(d)?;
            flat.extend_from_slice(d);
        }
        Ok(ChaosCloud {
            vertices,
            seed_point,
            dots: flat,
            choices,
            burn_in,
        })
    }

    pub fn vertices(&self) -> &PointSet {
        &self.vertices
    }

    pub fn seed_point(&self) -> &Point {
        &self.seed_point
    }

    pub fn dim(&self) -> usize {
        self.vertices.dim()
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    pub fn choices(&self) -> &[usize] {
        &self.choices
    }

    pub fn dot(&self, t: usize) -> &[f64] {
        let m = self.dim();
        &self.dots[t * m..(t + 1) * m]
    }

    pub fn dots(&self) -> std::slice::ChunksExact<'_, f64> {
        self.dots.chunks_exact(self.dim())
    }

    /// Dots at or after the burn-in, the ones meant for export.
    pub fn marked(&self) -> impl Iterator<Item = &[f64]> {
        self.dots().skip(self.burn_in)
    }

    pub fn marked_len(&self) -> usize {
        self.len().saturating_sub(self.burn_in)
    }

    /// The dot preceding `t` (the seed for `t = 0`).
    fn previous(&self, t: usize) -> &[f64] {
        if t == 0 {
            &self.seed_point
        } else {
            self.dot(t - 1)
        }
    }
}

/// Plays `steps` rounds of the chaos game on `s` from `seed_point`.
///
/// The seed is assumed to lie in `conv(S)`; that is not checked.
pub fn chaos_game(
    s: &PointSet,
    seed_point: &[f64],
    steps: usize,
    rng: &mut RngStream,
) -> Result<ChaosCloud> {
    let n = s.len();
    let choices: Vec<usize> = (0..steps).map(|_| rng.index(n)).collect();
    chaos_game_with_choices(s, seed_point, &choices)
}

/// Replays the chaos game for a fixed sequence of vertex choices.
pub fn chaos_game_with_choices(
    s: &PointSet,
    seed_point: &[f64],
    choices: &[usize],
) -> Result<ChaosCloud> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    if choices.is_empty() {
        return Err(Error::InvalidParameter("steps must be at least 1".into()));
    }
    s.check_dim(seed_point)?;
    let seed_point = Point::new(seed_point.to_vec())?;
    let m = s.dim();
    let mut dots = Vec::with_capacity(choices.len() * m);
    let mut cur = seed_point.coords().to_vec();
    for &c in choices {
        let v = s.get(c).ok_or(Error::IndexOutOfRange {
            index: c,
            len: s.len(),
        })?;
        for (x, y) in cur.iter_mut().zip(v) {
            *x = (*x + y) / 2.0;
        }
        dots.extend_from_slice(&cur);
    }
    Ok(ChaosCloud {
        vertices: s.clone(),
        seed_point,
        dots,
        choices: choices.to_vec(),
        burn_in: 0,
    })
}

/// Chaos game on [`equilateral_triangle`] from a random interior start, with
/// the first `burn_in` dots left unmarked.
pub fn sierpinski_cloud(steps: usize, burn_in: usize, rng: &mut RngStream) -> Result<ChaosCloud> {
    random_start_cloud(&equilateral_triangle(), steps, burn_in, rng)
}

/// Chaos game on an arbitrary vertex set from a random interior start, with
/// the first `burn_in` dots left unmarked.
pub fn random_start_cloud(
    s: &PointSet,
    steps: usize,
    burn_in: usize,
    rng: &mut RngStream,
) -> Result<ChaosCloud> {
    if steps <= burn_in {
        return Err(Error::InvalidParameter(format!(
            "steps ({steps}) must exceed burn_in ({burn_in})"
        )));
    }
    let start = random_interior(s, rng);
    let mut cloud = chaos_game(s, &start, steps, rng)?;
    cloud.burn_in = burn_in;
    Ok(cloud)
}

/// A point with uniformly distributed barycentric weights (flat Dirichlet).
pub(crate) fn random_interior(s: &PointSet, rng: &mut RngStream) -> Vec<f64> {
    let weights: Vec<f64> = (0..s.len()).map(|_| -(1.0 - rng.unit()).ln()).collect();
    let total: f64 = weights.iter().sum();
    let mut out = vec![0.0; s.dim()];
    for (v, w) in s.iter().zip(&weights) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += w / total * x;
        }
    }
    out
}

/// Checks that every dot sits in the sub-cell addressed by its most recent
/// choices.
///
/// Write `H_i(x) = (x + v_i) / 2`. With the last `d = min(depth, t + 1)`
/// choices `c_t, ..., c_{t-d+1}`, dot `t` must equal
/// `H_{c_t} ∘ ... ∘ H_{c_{t-d+1}}(a)` where the anchor `a` is dot `t - d`
/// (or the seed). Expanding the composition gives
/// `o + 2^{-d} a` with `o = Σ_k 2^{-(k+1)} v_{c_{t-k}}`, which is evaluated
/// directly rather than by replaying the moves. Since the anchor lies in
/// `conv(S)`, passing means the dot lies in the cell `o + 2^{-d} conv(S)`.
/// Anchors are additionally required to lie in the bounding box of `S`.
pub fn cell_address_check(cloud: &ChaosCloud, depth: usize) -> bool {
    if depth == 0 {
        return true;
    }
    let s = cloud.vertices();
    let m = cloud.dim();
    let (lo, hi) = bounding_box(s);
    let in_box = |x: &[f64]| {
        x.iter()
            .enumerate()
            .all(|(j, &c)| c >= lo[j] - CELL_TOL && c <= hi[j] + CELL_TOL)
    };
    let mut offset = vec![0.0; m];
    for t in 0..cloud.len() {
        let d = depth.min(t + 1);
        let anchor = cloud.previous(t + 1 - d);
        if !in_box(anchor) {
            return false;
        }
        offset.iter_mut().for_each(|o| *o = 0.0);
        let mut w = 0.5;
        for k in 0..d {
            let v = s.point(cloud.choices[t - k]);
            for (o, x) in offset.iter_mut().zip(v) {
                *o += w * x;
            }
            w *= 0.5;
        }
        let scale = 2f64.powi(-(d as i32));
        let dot = cloud.dot(t);
        let ok = (0..m).all(|j| (dot[j] - (offset[j] + scale * anchor[j])).abs() <= CELL_TOL);
        if !ok {
            return false;
        }
    }
    true
}

fn bounding_box(s: &PointSet) -> (Vec<f64>, Vec<f64>) {
    let m = s.dim();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for v in s.iter() {
        for j in 0..m {
            lo[j] = lo[j].min(v[j]);
            hi[j] = hi[j].max(v[j]);
        }
    }
    (lo, hi)
}

/// Searches the cloud for a dot `p'` at which `v` is a pivot and
/// `d(p, nearest(p; p' v)) <= ε d(p, v)`.
///
/// Returns the first such dot and its ratio `d(p, p'') / d(p, v)`. This is a
/// finite search and proves nothing either way.
pub fn hypothesis_probe(
    p: &[f64],
    s: &PointSet,
    v_index: usize,
    epsilon: f64,
    cloud: &ChaosCloud,
) -> Result<Option<(usize, f64)>> {
    s.check_dim(p)?;
    let v = s.get(v_index).ok_or(Error::IndexOutOfRange {
        index: v_index,
        len: s.len(),
    })?;
    if cloud.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: cloud.dim(),
        });
    }
    let dv2 = sq_dist(p, v);
    let limit2 = epsilon * epsilon * dv2;
    let mut scratch = vec![0.0; s.dim()];
    for (t, dot) in cloud.dots().enumerate() {
        if !PivotTest::new(p, dot).is_pivot(v) {
            continue;
        }
        let alpha = segment_alpha(p, dot, v);
        lerp_into(&mut scratch, dot, v, alpha);
        let d2 = sq_dist(p, &scratch);
        if d2 <= limit2 {
            let ratio = if d2 == 0.0 { 0.0 } else { (d2 / dv2).sqrt() };
            return Ok(Some((t, ratio)));
        }
    }
    Ok(None)
}

mod rows {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::geometry::PointSet;

    pub fn serialize<S: Serializer>(s: &PointSet, ser: S) -> Result<S::Ok, S::Error> {
        s.to_rows().serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<PointSet, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(de)?;
        PointSet::from_rows(rows).map_err(serde::de::Error::custom)
    }
}
