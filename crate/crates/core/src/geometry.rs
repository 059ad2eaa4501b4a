//! Geometric primitives shared by every solver variant.
//!
//! Distances are kept squared on every hot path. Pivot and witness tests use
//! raw IEEE comparisons with no tolerance; the solvers re-verify any
//! certificate before it is reported.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in m-dimensional Euclidean space with finite coordinates.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Point(coords))
    }

    /// Builds a point without validation. Callers guarantee finiteness.
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Point").field(&self.0).finish()
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.0
    }
}

/// The finite set `S` of `n` points, stored row-major in one buffer.
#[derive(Clone, PartialEq)]
pub struct PointSet {
    data: Vec<f64>,
    dim: usize,
}

impl PointSet {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptySet)?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut data = Vec::with_capacity(dim * rows.len());
        for row in &rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            if let Some(i) = row.iter().position(|c| !c.is_finite()) {
                return Err(Error::NonFinite(data.len() + i));
            }
            data.extend_from_slice(row);
        }
        Ok(PointSet { data, dim })
    }

    pub fn from_points(points: &[Point]) -> Result<Self> {
        Self::from_rows(points.iter().map(|p| p.coords().to_vec()).collect())
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    /// Always false for a constructed set; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, i: usize) -> Option<&[f64]> {
        (i < self.len()).then(|| self.point(i))
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    pub fn check_dim(&self, p: &[f64]) -> Result<()> {
        check_dims(self.dim, p.len())
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

/// Rule for choosing among several pivots at an iterate.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
pub enum PivotStrategy {
    /// Lowest index satisfying `d(p', v) >= d(p, v)`.
    #[default]
    FirstIndex,
    /// Index maximising `d²(p', v) - d²(p, v)`, lowest index on ties.
    BestGap,
    /// Lowest index with angle `p' p v` at least a right angle.
    StrictFirst,
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dims(a.len(), b.len())?;
    Ok(sq_dist(a, b))
}

/// `R = max_i d(p, v_i)`.
pub fn radius(p: &[f64], s: &PointSet) -> Result<f64> {
    s.check_dim(p)?;
    Ok(max_sq_dist(p, s).sqrt())
}

pub(crate) fn max_sq_dist(p: &[f64], s: &PointSet) -> f64 {
    s.iter().map(|v| sq_dist(p, v)).fold(0.0, f64::max)
}

/// Precomputed quantities for testing many candidate pivots at one iterate.
///
/// With `diff = p' - p` and `lhs = p'ᵀp' - pᵀp`, `v` is a pivot iff
/// `lhs >= 2 vᵀ diff`, and `lhs - 2 vᵀ diff = d²(p', v) - d²(p, v)`.
pub(crate) struct PivotTest<'a> {
    p: &'a [f64],
    diff: Vec<f64>,
    lhs: f64,
}

impl<'a> PivotTest<'a> {
    pub(crate) fn new(p: &'a [f64], p_prime: &[f64]) -> Self {
        let diff = p_prime.iter().zip(p).map(|(a, b)| a - b).collect();
        let lhs = dot(p_prime, p_prime) - dot(p, p);
        PivotTest { p, diff, lhs }
    }

    #[inline]
    pub(crate) fn gap(&self, v: &[f64]) -> f64 {
        self.lhs - 2.0 * dot(v, &self.diff)
    }

    #[inline]
    pub(crate) fn is_pivot(&self, v: &[f64]) -> bool {
        self.lhs >= 2.0 * dot(v, &self.diff)
    }

    #[inline]
    pub(crate) fn is_strict(&self, v: &[f64]) -> bool {
        let cos_num: f64 = self
            .diff
            .iter()
            .zip(v.iter().zip(self.p))
            .map(|(d, (vi, pi))| d * (vi - pi))
            .sum();
        cos_num <= 0.0
    }

    pub(crate) fn find(&self, s: &PointSet, strategy: PivotStrategy) -> Option<usize> {
        match strategy {
            PivotStrategy::FirstIndex => s.iter().position(|v| self.is_pivot(v)),
            PivotStrategy::StrictFirst => s.iter().position(|v| self.is_strict(v)),
            PivotStrategy::BestGap => {
                let mut best: Option<(usize, f64)> = None;
                for (i, v) in s.iter().enumerate() {
                    if !self.is_pivot(v) {
                        continue;
                    }
                    let g = self.gap(v);
                    if best.is_none_or(|(_, bg)| g > bg) {
                        best = Some((i, g));
                    }
                }
                best.map(|(i, _)| i)
            }
        }
    }
}

/// Pivot test in the square-root-free form `p'ᵀp' - pᵀp >= 2vᵀ(p' - p)`.
pub fn is_pivot(p: &[f64], p_prime: &[f64], v: &[f64]) -> Result<bool> {
    check_dims(p.len(), p_prime.len())?;
    check_dims(p.len(), v.len())?;
    Ok(PivotTest::new(p, p_prime).is_pivot(v))
}

/// Strict pivot test `(p' - p)ᵀ(v - p) <= 0`.
///
/// When `p' == p` the angle is undefined and every `v` is reported strict.
pub fn is_strict_pivot(p: &[f64], p_prime: &[f64], v: &[f64]) -> Result<bool> {
    check_dims(p.len(), p_prime.len())?;
    check_dims(p.len(), v.len())?;
    Ok(PivotTest::new(p, p_prime).is_strict(v))
}

pub fn find_pivot(
    p: &[f64],
    p_prime: &[f64],
    s: &PointSet,
    strategy: PivotStrategy,
) -> Result<Option<usize>> {
    check_dims(p.len(), p_prime.len())?;
    s.check_dim(p)?;
    Ok(PivotTest::new(p, p_prime).find(s, strategy))
}

/// Step length along `p' -> v` toward the point nearest to `p`, clamped to `[0, 1]`.
pub(crate) fn segment_alpha(p: &[f64], p_prime: &[f64], v: &[f64]) -> f64 {
    let len2 = sq_dist(v, p_prime);
    if len2 == 0.0 {
        return 0.0;
    }
    let num: f64 = p
        .iter()
        .zip(p_prime)
        .zip(v)
        .map(|((pi, qi), vi)| (pi - qi) * (vi - qi))
        .sum();
    let alpha = num / len2;
    if alpha > 1.0 {
        1.0
    } else if alpha >= 0.0 {
        alpha
    } else {
        0.0
    }
}

/// `(1 - alpha) a + alpha b`, with the endpoints returned exactly.
pub(crate) fn lerp_into(out: &mut [f64], a: &[f64], b: &[f64], alpha: f64) {
    if alpha == 0.0 {
        out.copy_from_slice(a);
    } else if alpha == 1.0 {
        out.copy_from_slice(b);
    } else {
        let keep = 1.0 - alpha;
        for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
            *o = keep * x + alpha * y;
        }
    }
}

/// The point of segment `[p', v]` nearest to `p`, with its step length.
///
/// A raw step length below zero clamps to `p'` and one above one clamps to
/// `v`. A zero-length segment returns `(p', 0)`.
pub fn nearest_on_segment(p: &[f64], p_prime: &[f64], v: &[f64]) -> Result<(Point, f64)> {
    check_dims(p.len(), p_prime.len())?;
    check_dims(p.len(), v.len())?;
    let alpha = segment_alpha(p, p_prime, v);
    let mut out = vec![0.0; p.len()];
    lerp_into(&mut out, p_prime, v, alpha);
    Ok((Point::from_vec_unchecked(out), alpha))
}

pub(crate) fn witness_holds(p: &[f64], p_prime: &[f64], s: &PointSet) -> bool {
    s.iter().all(|v| sq_dist(p_prime, v) < sq_dist(p, v))
}

/// True iff `d(p', v) < d(p, v)` for every `v` in `S`.
pub fn is_witness(p: &[f64], p_prime: &[f64], s: &PointSet) -> Result<bool> {
    check_dims(p.len(), p_prime.len())?;
    s.check_dim(p)?;
    Ok(witness_holds(p, p_prime, s))
}

/// Bounds `(d(p,p')/2, d(p,p'))` on `d(p, conv S)` implied by a witness `p'`.
pub fn witness_gap_bounds(p: &[f64], p_prime: &[f64]) -> Result<(f64, f64)> {
    check_dims(p.len(), p_prime.len())?;
    let upper = sq_dist(p, p_prime).sqrt();
    Ok((upper / 2.0, upper))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(rows: &[&[f64]]) -> PointSet {
        PointSet::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn squared_distance_examples() {
        assert_eq!(squared_distance(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(squared_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 25.0);
        let (a, b): ([f64; 3], [f64; 3]) = ([1.0, 2.0, 3.0], [4.0, 6.0, 3.0]);
        let oracle: f64 = (0..3).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum::<f64>();
        assert_eq!(oracle, 25.0);
        assert_eq!(squared_distance(&a, &b).unwrap(), oracle);
    }

    #[test]
    fn squared_distance_rejects_mismatch() {
        assert_eq!(
            squared_distance(&[0.0], &[0.0, 1.0]),
            Err(Error::DimensionMismatch {
                expected: 1,
                found: 2
            })
        );
    }

    #[test]
    fn radius_examples() {
        assert_eq!(
            radius(&[0.0, 0.0], &set(&[&[1.0, 0.0], &[0.0, 2.0]])).unwrap(),
            2.0
        );
        assert_eq!(radius(&[0.0, 0.0], &set(&[&[0.0, 0.0]])).unwrap(), 0.0);
        let s = set(&[&[4.0, 5.0], &[1.0, 1.0], &[2.0, 2.0]]);
        let brute = s
            .iter()
            .map(|v| ((v[0] - 1.0f64).powi(2) + (v[1] - 1.0f64).powi(2)).sqrt())
            .fold(0.0, f64::max);
        assert_eq!(brute, 5.0);
        assert_eq!(radius(&[1.0, 1.0], &s).unwrap(), 5.0);
        assert!(radius(&[1.0], &s).is_err());
    }

    #[test]
    fn pivot_examples() {
        assert!(is_pivot(&[0.0, 0.0], &[1.0, 0.0], &[-1.0, 0.0]).unwrap());
        assert!(!is_pivot(&[0.0, 0.0], &[1.0, 0.0], &[1.0, 0.0]).unwrap());
        assert!(is_pivot(&[0.0, 0.0], &[0.0, 0.0], &[5.0, 7.0]).unwrap());
    }

    #[test]
    fn strict_pivot_examples() {
        assert!(is_strict_pivot(&[0.0, 0.0], &[1.0, 0.0], &[-1.0, 0.0]).unwrap());
        assert!(is_strict_pivot(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]).unwrap());
        assert!(!is_strict_pivot(&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]).unwrap());
    }

    #[test]
    fn strict_pivot_at_coincident_iterate_is_true() {
        for v in [[3.0, -2.0], [0.0, 0.0], [1e9, 1.0]] {
            assert!(is_strict_pivot(&[1.0, 1.0], &[1.0, 1.0], &v).unwrap());
        }
    }

    #[test]
    fn find_pivot_examples() {
        let s = set(&[&[1.0, 0.0], &[-1.0, 0.0]]);
        assert_eq!(
            find_pivot(&[0.0, 0.0], &[1.0, 0.0], &s, PivotStrategy::FirstIndex).unwrap(),
            Some(1)
        );

        // Both points strictly closer to p' than to p.
        let s = set(&[&[1.0, 0.0], &[2.0, 0.0]]);
        for v in s.iter() {
            assert!(sq_dist(&[0.1, 0.0], v) < sq_dist(&[0.0, 0.0], v));
        }
        assert_eq!(
            find_pivot(&[0.0, 0.0], &[0.1, 0.0], &s, PivotStrategy::FirstIndex).unwrap(),
            None
        );

        let s = set(&[&[-1.0, 0.0], &[-2.0, 0.0]]);
        let gaps: Vec<f64> = s
            .iter()
            .map(|v| sq_dist(&[1.0, 0.0], v) - sq_dist(&[0.0, 0.0], v))
            .collect();
        assert_eq!(gaps, vec![3.0, 5.0]);
        assert_eq!(
            find_pivot(&[0.0, 0.0], &[1.0, 0.0], &s, PivotStrategy::BestGap).unwrap(),
            Some(1)
        );
    }

    #[test]
    fn best_gap_prefers_lowest_index_on_tie() {
        let s = set(&[&[0.0, 1.0], &[-1.0, 0.0], &[-1.0, 0.0]]);
        assert_eq!(
            find_pivot(&[0.0, 0.0], &[1.0, 0.0], &s, PivotStrategy::BestGap).unwrap(),
            Some(1)
        );
    }

    #[test]
    fn equality_counts_as_pivot_not_witness() {
        // d(p', v) == d(p, v) for v on the bisector.
        let s = set(&[&[0.5, 3.0]]);
        assert_eq!(
            find_pivot(&[0.0, 0.0], &[1.0, 0.0], &s, PivotStrategy::FirstIndex).unwrap(),
            Some(0)
        );
        assert!(!is_witness(&[0.0, 0.0], &[1.0, 0.0], &s).unwrap());
    }

    #[test]
    fn strict_first_finds_right_angle() {
        let s = set(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert_eq!(
            find_pivot(&[0.0, 0.0], &[1.0, 0.0], &s, PivotStrategy::StrictFirst).unwrap(),
            Some(1)
        );
    }

    #[test]
    fn nearest_on_segment_examples() {
        let (q, a) = nearest_on_segment(&[0.0, 0.0], &[0.0, 1.0], &[2.0, 1.0]).unwrap();
        assert_eq!((q.coords(), a), (&[0.0, 1.0][..], 0.0));
        let (q, a) = nearest_on_segment(&[1.0, 0.0], &[0.0, 0.0], &[2.0, 0.0]).unwrap();
        assert_eq!((q.coords(), a), (&[1.0, 0.0][..], 0.5));
        assert_eq!(sq_dist(&q, &[1.0, 0.0]), 0.0);
        let (q, a) = nearest_on_segment(&[3.0, 0.0], &[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!((q.coords(), a), (&[1.0, 0.0][..], 1.0));
    }

    #[test]
    fn nearest_on_segment_degenerate_and_backward() {
        let (q, a) = nearest_on_segment(&[5.0, 5.0], &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!((q.coords(), a), (&[1.0, 1.0][..], 0.0));
        // v not a pivot: raw alpha is negative, clamp to p'.
        let (q, a) = nearest_on_segment(&[-3.0, 0.0], &[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!((q.coords(), a), (&[0.0, 0.0][..], 0.0));
    }

    #[test]
    fn witness_examples() {
        let s = set(&[&[1.0, 0.0], &[2.0, 0.0]]);
        assert!(is_witness(&[0.0, 0.0], &[1.0, 0.0], &s).unwrap());
        assert!(!is_witness(&[0.0, 0.0], &[1.0, 0.0], &set(&[&[-1.0, 0.0]])).unwrap());
        assert!(!is_witness(&[0.0, 0.0], &[0.0, 0.0], &set(&[&[1.0, 1.0]])).unwrap());
    }

    #[test]
    fn gap_bounds_examples() {
        assert_eq!(
            witness_gap_bounds(&[0.0, 0.0], &[1.0, 0.0]).unwrap(),
            (0.5, 1.0)
        );
        assert_eq!(
            witness_gap_bounds(&[0.0, 0.0], &[0.0, 2.0]).unwrap(),
            (1.0, 2.0)
        );
        // Distance from the origin to segment [(1,0),(2,0)] is 1.
        let (lo, hi) = witness_gap_bounds(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!(lo <= 1.0 && 1.0 <= hi);
    }

    #[test]
    fn point_set_validation() {
        assert_eq!(PointSet::from_rows(vec![]), Err(Error::EmptySet));
        assert_eq!(PointSet::from_rows(vec![vec![]]), Err(Error::ZeroDimension));
        assert!(matches!(
            PointSet::from_rows(vec![vec![1.0, 2.0], vec![1.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            PointSet::from_rows(vec![vec![1.0, 2.0], vec![1.0, f64::NAN]]),
            Err(Error::NonFinite(3))
        );
        assert_eq!(Point::new(vec![f64::INFINITY]), Err(Error::NonFinite(0)));
        assert_eq!(Point::new(vec![]), Err(Error::ZeroDimension));
    }
}
