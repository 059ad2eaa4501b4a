//! Seeded instance generators whose answer is known by construction.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, Point, PointSet};
use crate::rng::{RngStream, STREAM_INSTANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Truth {
    MemberInterior,
    MemberBoundaryNear,
    #[serde(rename = "nonmember")]
    NonMember,
}

impl Truth {
    pub fn is_member(self) -> bool {
        self != Truth::NonMember
    }

    pub fn name(self) -> &'static str {
        match self {
            Truth::MemberInterior => "member-interior",
            Truth::MemberBoundaryNear => "member-boundary-near",
            Truth::NonMember => "nonmember",
        }
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Truth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Truth::MemberInterior,
            Truth::MemberBoundaryNear,
            Truth::NonMember,
        ]
        .into_iter()
        .find(|t| t.name() == s)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown truth `{s}`")))
    }
}

/// A membership query `(S, p)` plus whatever is known about its answer.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub points: PointSet,
    pub p: Point,
    pub truth: Option<Truth>,
    /// Lower bound on `d(p, conv S)` for non-members.
    pub known_margin: Option<f64>,
    /// Radius of a ball around `p` inside `conv S`, when known exactly.
    pub known_rho: Option<f64>,
    pub seed: Option<u64>,
    /// Convex weights reproducing `p`, for members.
    pub coeffs: Option<Vec<f64>>,
    /// Unit direction `u` with `uᵀv_i - uᵀp >= known_margin`, for non-members.
    pub direction: Option<Vec<f64>>,
}

impl Instance {
    pub fn new(points: PointSet, p: Point) -> Result<Self> {
        points.check_dim(&p)?;
        Ok(Instance {
            points,
            p,
            truth: None,
            known_margin: None,
            known_rho: None,
            seed: None,
            coeffs: None,
            direction: None,
        })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn m(&self) -> usize {
        self.points.dim()
    }

    /// Largest per-coordinate gap between `p` and `Σ λ_i v_i`.
    pub fn reconstruction_error(&self) -> Option<f64> {
        let lambda = self.coeffs.as_ref()?;
        let q = combine(&self.points, lambda);
        Some(
            q.iter()
                .zip(self.p.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }

    /// `min_i uᵀ(v_i - p)`, the separation achieved by the stored direction.
    pub fn directional_gap(&self) -> Option<f64> {
        let u = self.direction.as_ref()?;
        let up = dot(u, &self.p);
        Some(
            self.points
                .iter()
                .map(|v| dot(u, v) - up)
                .fold(f64::INFINITY, f64::min),
        )
    }
}

fn combine(s: &PointSet, lambda: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; s.dim()];
    for (v, &l) in s.iter().zip(lambda) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += l * x;
        }
    }
    out
}

fn uniform_cube(n: usize, m: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..m).map(|_| rng.unit()).collect())
        .collect()
}

fn check_shape(n: usize, m: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptySet);
    }
    if m == 0 {
        return Err(Error::ZeroDimension);
    }
    Ok(())
}

/// `S` uniform in `[0,1]^m`; `p = Σ λ_i v_i` with every `λ_i >= 1/(2n)`.
pub fn gen_interior(n: usize, m: usize, seed: u64) -> Result<Instance> {
    check_shape(n, m)?;
    let mut rng = RngStream::new(seed, STREAM_INSTANCE);
    let rows = uniform_cube(n, m, &mut rng);
    let lambda = interior_weights(n, &mut rng);
    let points = PointSet::from_rows(rows)?;
    let p = Point::new(combine(&points, &lambda))?;
    Ok(Instance {
        truth: Some(Truth::MemberInterior),
        seed: Some(seed),
        coeffs: Some(lambda),
        ..Instance::new(points, p)?
    })
}

/// Half the mass spread evenly, half drawn from a flat Dirichlet.
fn interior_weights(n: usize, rng: &mut RngStream) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.unit()).ln()).collect();
    let total: f64 = e.iter().sum();
    let floor = 1.0 / (2.0 * n as f64);
    e.iter().map(|x| floor + 0.5 * x / total).collect()
}

/// `p` at the origin, `S` in the slab `margin <= x₁ <= 1 + margin`, and the
/// whole configuration turned by a seeded random rotation.
pub fn gen_nonmember(n: usize, m: usize, seed: u64, margin: f64) -> Result<Instance> {
    gen_nonmember_with(n, m, seed, margin, true)
}

/// As [`gen_nonmember`]; `rotate = false` keeps the slab axis-aligned.
pub fn gen_nonmember_with(
    n: usize,
    m: usize,
    seed: u64,
    margin: f64,
    rotate: bool,
) -> Result<Instance> {
    check_shape(n, m)?;
    if !(margin > 0.0 && margin.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "margin must be positive, got {margin}"
        )));
    }
    let mut rng = RngStream::new(seed, STREAM_INSTANCE);
    let raw: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut row = vec![margin + rng.unit()];
            row.extend((1..m).map(|_| rng.unit() - 0.5));
            row
        })
        .collect();
    let q = if rotate {
        random_rotation(m, &mut rng)
    } else {
        identity(m)
    };
    let rows: Vec<Vec<f64>> = raw.iter().map(|r| mat_vec(&q, r)).collect();
    let direction: Vec<f64> = (0..m).map(|i| q[i][0]).collect();
    let points = PointSet::from_rows(rows)?;
    let p = Point::new(vec![0.0; m])?;
    let mut inst = Instance {
        truth: Some(Truth::NonMember),
        seed: Some(seed),
        direction: Some(direction),
        ..Instance::new(points, p)?
    };
    // Rotation rounding can shave an ulp off the margin; report what holds.
    let achieved = inst.directional_gap().unwrap_or(margin);
    inst.known_margin = Some(margin.min(achieved));
    Ok(inst)
}

fn identity(m: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn mat_vec(q: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    q.iter().map(|row| dot(row, x)).collect()
}

/// Orthogonal matrix from modified Gram-Schmidt on a Gaussian matrix.
/// Columns are the orthonormal basis; `q[i][j]` is row `i`, column `j`.
fn random_rotation(m: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(m);
    while cols.len() < m {
        let mut c: Vec<f64> = (0..m).map(|_| rng.normal()).collect();
        for b in &cols {
            let proj = dot(&c, b);
            c.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
        }
        let norm = dot(&c, &c).sqrt();
        if norm > 1e-8 {
            c.iter_mut().for_each(|x| *x /= norm);
            cols.push(c);
        }
    }
    (0..m)
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect()
}

/// Vertices of the regular unit-edge simplex in `ℝᵐ` with `p` at its centroid.
pub fn gen_simplex_centroid(m: usize) -> Result<Instance> {
    check_shape(1, m)?;
    let verts = regular_simplex(m);
    let n = verts.len();
    let points = PointSet::from_rows(verts)?;
    let lambda = vec![1.0 / n as f64; n];
    let p = Point::new(combine(&points, &lambda))?;
    Ok(Instance {
        truth: Some(Truth::MemberInterior),
        known_rho: Some(simplex_inradius(m)),
        coeffs: Some(lambda),
        ..Instance::new(points, p)?
    })
}

/// Inradius `1/√(2m(m+1))` of the regular unit-edge m-simplex.
pub fn simplex_inradius(m: usize) -> f64 {
    let mf = m as f64;
    1.0 / (2.0 * mf * (mf + 1.0)).sqrt()
}

/// Circumradius `√(m/(2(m+1)))` of the regular unit-edge m-simplex.
pub fn simplex_circumradius(m: usize) -> f64 {
    let mf = m as f64;
    (mf / (2.0 * (mf + 1.0))).sqrt()
}

/// Each new vertex sits above the centroid of the previous ones, along a
/// fresh axis, at the height that makes every edge unit length.
fn regular_simplex(m: usize) -> Vec<Vec<f64>> {
    let mut verts = vec![vec![0.0; m]];
    for k in 1..=m {
        let mut centroid = vec![0.0; m];
        for v in &verts {
            centroid.iter_mut().zip(v).for_each(|(c, x)| *c += x);
        }
        centroid.iter_mut().for_each(|c| *c /= k as f64);
        let r2 = if k == 1 {
            0.0
        } else {
            simplex_circumradius(k - 1).powi(2)
        };
        centroid[k - 1] = (1.0 - r2).sqrt();
        verts.push(centroid);
    }
    verts
}

/// An interior instance with `p` pulled to `(1-δ) f + δ c`, where `f` is the
/// midpoint of the two vertices extreme along the first axis and `c` the
/// vertex centroid.
pub fn gen_near_boundary(n: usize, m: usize, seed: u64, delta: f64) -> Result<Instance> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "near-boundary instances need n >= 3, got {n}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let base = gen_interior(n, m, seed)?;
    let s = base.points;
    let lo = argext(&s, |a, b| a < b);
    let mut hi = argext(&s, |a, b| a > b);
    if hi == lo {
        hi = (lo + 1) % n;
    }
    let mut lambda = vec![delta / n as f64; n];
    lambda[lo] += (1.0 - delta) * 0.5;
    lambda[hi] += (1.0 - delta) * 0.5;
    let p = Point::new(combine(&s, &lambda))?;
    Ok(Instance {
        truth: Some(Truth::MemberBoundaryNear),
        seed: Some(seed),
        coeffs: Some(lambda),
        ..Instance::new(s, p)?
    })
}

fn argext(s: &PointSet, better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, v) in s.iter().enumerate() {
        if better(v[0], s.point(best)[0]) {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sq_dist;

    #[test]
    fn interior_triangle_reconstructs() {
        for seed in 0..20 {
            let inst = gen_interior(3, 2, seed).unwrap();
            assert!(inst.reconstruction_error().unwrap() <= 1e-9);
            let lambda = inst.coeffs.as_ref().unwrap();
            assert!(lambda.iter().all(|&l| l >= 1.0 / 6.0 - 1e-15));
            assert!((lambda.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_singleton_is_the_point() {
        let inst = gen_interior(1, 4, 9).unwrap();
        assert_eq!(inst.p.coords(), inst.points.point(0));
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(
            gen_interior(20, 5, 1).unwrap(),
            gen_interior(20, 5, 1).unwrap()
        );
        assert_ne!(
            gen_interior(20, 5, 1).unwrap(),
            gen_interior(20, 5, 2).unwrap()
        );
        assert_eq!(
            gen_nonmember(10, 4, 3, 0.2).unwrap(),
            gen_nonmember(10, 4, 3, 0.2).unwrap()
        );
    }

    #[test]
    fn nonmember_margin_holds() {
        for seed in 0..20 {
            let inst = gen_nonmember(15, 6, seed, 0.25).unwrap();
            let u = inst.direction.as_ref().unwrap();
            assert!((dot(u, u) - 1.0).abs() < 1e-12);
            let margin = inst.known_margin.unwrap();
            assert!((margin - 0.25).abs() < 1e-12);
            assert!(inst.directional_gap().unwrap() >= margin);
        }
        assert!(gen_nonmember(3, 2, 0, 0.0).is_err());
        assert!(gen_nonmember(3, 2, 0, -1.0).is_err());
    }

    #[test]
    fn nonmember_axis_aligned_keeps_slab() {
        let inst = gen_nonmember_with(2, 2, 0, 1.0, false).unwrap();
        assert_eq!(inst.direction.as_deref(), Some(&[1.0, 0.0][..]));
        assert!(inst.points.iter().all(|v| (1.0..=2.0).contains(&v[0])));
    }

    #[test]
    fn rotation_is_orthogonal() {
        let mut rng = RngStream::new(5, STREAM_INSTANCE);
        let q = random_rotation(7, &mut rng);
        for i in 0..7 {
            for j in 0..7 {
                let col_dot: f64 = (0..7).map(|k| q[k][i] * q[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((col_dot - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn simplex_has_unit_edges() {
        for m in 1..=12 {
            let inst = gen_simplex_centroid(m).unwrap();
            let s = &inst.points;
            assert_eq!(s.len(), m + 1);
            for i in 0..s.len() {
                for j in 0..i {
                    assert!((sq_dist(s.point(i), s.point(j)) - 1.0).abs() < 1e-12);
                }
                let r = sq_dist(&inst.p, s.point(i)).sqrt();
                assert!((r - simplex_circumradius(m)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn simplex_low_dimensions() {
        let seg = gen_simplex_centroid(1).unwrap();
        assert_eq!(seg.p.coords(), &[0.5]);
        assert_eq!(seg.known_rho, Some(0.5));
        assert_eq!(simplex_circumradius(1), 0.5);

        assert!((simplex_circumradius(2) - 0.577_350_269_189_625_8).abs() < 1e-15);
        assert!((simplex_inradius(2) - 0.288_675_134_594_812_9).abs() < 1e-15);
        assert!((simplex_circumradius(2) / simplex_inradius(2) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn near_boundary_reconstructs() {
        for delta in [0.5, 1e-2, 1e-4] {
            let inst = gen_near_boundary(3, 2, 4, delta).unwrap();
            assert_eq!(inst.truth, Some(Truth::MemberBoundaryNear));
            assert!(inst.reconstruction_error().unwrap() <= 1e-9);
            let lambda = inst.coeffs.as_ref().unwrap();
            assert!(lambda.iter().all(|&l| l > 0.0));
        }
        assert!(gen_near_boundary(2, 2, 0, 0.5).is_err());
        assert!(gen_near_boundary(3, 2, 0, 0.0).is_err());
        assert!(gen_near_boundary(3, 2, 0, 1.0).is_err());
    }
}
