use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{lerp_into, segment_alpha, Point, PointSet};

/// Tolerance on `|Σ coeffs - 1|`.
pub const COEFF_SUM_TOL: f64 = 1e-9;
/// Most negative coefficient accepted before clamping.
pub const COEFF_NEG_TOL: f64 = -1e-12;
/// Relative per-coordinate tolerance between the point and its reconstruction.
pub const RECONSTRUCTION_TOL: f64 = 1e-7;

/// An iterate `p'` together with barycentric weights over `S` that certify
/// `p' ∈ conv(S)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexIterate {
    pub(crate) point: Point,
    pub(crate) coeffs: Vec<f64>,
}

/// What an iterate moves toward: a vertex of `S` or another iterate.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Toward<'a> {
    Vertex(usize),
    Iterate(&'a ConvexIterate),
}

impl ConvexIterate {
    /// The iterate sitting exactly on vertex `index`.
    pub fn at_vertex(s: &PointSet, index: usize) -> Result<Self> {
        let v = s.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: s.len(),
        })?;
        let mut coeffs = vec![0.0; s.len()];
        coeffs[index] = 1.0;
        Ok(ConvexIterate {
            point: Point::from_vec_unchecked(v.to_vec()),
            coeffs,
        })
    }

    /// Builds an iterate from explicit weights; the point is their combination.
    pub fn from_coeffs(s: &PointSet, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != s.len() {
            return Err(Error::DimensionMismatch {
                expected: s.len(),
                found: coeffs.len(),
            });
        }
        let point = Point::from_vec_unchecked(combine(s, &coeffs));
        Ok(ConvexIterate { point, coeffs })
    }

    /// Constructs an iterate from parts without any consistency check.
    pub fn from_parts(point: Point, coeffs: Vec<f64>) -> Self {
        ConvexIterate { point, coeffs }
    }

    pub fn point(&self) -> &Point {
        &self.point
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_parts(self) -> (Point, Vec<f64>) {
        (self.point, self.coeffs)
    }

    /// `Σ coeffs_i v_i`, computed afresh.
    pub fn reconstruct(&self, s: &PointSet) -> Vec<f64> {
        combine(s, &self.coeffs)
    }

    /// Checks weight nonnegativity, unit sum and agreement with the point.
    pub fn satisfies_invariants(&self, s: &PointSet) -> bool {
        if self.coeffs.len() != s.len() || self.point.dim() != s.dim() {
            return false;
        }
        if self
            .coeffs
            .iter()
            .any(|c| !c.is_finite() || *c < COEFF_NEG_TOL)
        {
            return false;
        }
        let sum: f64 = self.coeffs.iter().sum();
        if (sum - 1.0).abs() > COEFF_SUM_TOL {
            return false;
        }
        self.reconstruction_error(s) <= RECONSTRUCTION_TOL
    }

    /// Largest per-coordinate relative gap between the point and its reconstruction.
    pub fn reconstruction_error(&self, s: &PointSet) -> f64 {
        self.reconstruct(s)
            .iter()
            .zip(self.point.iter())
            .map(|(r, x)| (r - x).abs() / r.abs().max(1.0))
            .fold(0.0, f64::max)
    }

    /// Replaces `p'` by `nearest(p; p' v)` and returns the step length used.
    ///
    /// Solvers only call this toward a pivot, but the step is well defined
    /// for any `v`: a backward step length clamps to zero.
    pub fn step_nearest(&mut self, p: &[f64], s: &PointSet, v_index: usize) -> f64 {
        self.nearest_toward(p, s, Toward::Vertex(v_index))
    }

    /// Replaces `p'` by `(p' + v) / 2`.
    pub fn step_midpoint(&mut self, s: &PointSet, v_index: usize) {
        self.midpoint_toward(s, Toward::Vertex(v_index));
    }

    pub(crate) fn nearest_toward(&mut self, p: &[f64], s: &PointSet, to: Toward<'_>) -> f64 {
        let alpha = segment_alpha(p, &self.point, target_point(s, to));
        self.move_toward(s, to, alpha);
        alpha
    }

    pub(crate) fn midpoint_toward(&mut self, s: &PointSet, to: Toward<'_>) {
        let v = target_point(s, to);
        for (x, y) in self.point.coords_mut().iter_mut().zip(v) {
            *x = (*x + y) / 2.0;
        }
        self.blend_coeffs(to, 0.5);
    }

    fn move_toward(&mut self, s: &PointSet, to: Toward<'_>, alpha: f64) {
        if alpha == 0.0 {
            return;
        }
        let v = target_point(s, to);
        let mut next = vec![0.0; v.len()];
        lerp_into(&mut next, &self.point, v, alpha);
        self.point.coords_mut().copy_from_slice(&next);
        self.blend_coeffs(to, alpha);
    }

    fn blend_coeffs(&mut self, to: Toward<'_>, alpha: f64) {
        if alpha == 1.0 {
            match to {
                Toward::Vertex(j) => {
                    self.coeffs.iter_mut().for_each(|c| *c = 0.0);
                    self.coeffs[j] = 1.0;
                }
                Toward::Iterate(other) => self.coeffs.copy_from_slice(&other.coeffs),
            }
            return;
        }
        let keep = 1.0 - alpha;
        match to {
            Toward::Vertex(j) => {
                self.coeffs.iter_mut().for_each(|c| *c *= keep);
                self.coeffs[j] += alpha;
            }
            Toward::Iterate(other) => {
                for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
                    *c = keep * *c + alpha * o;
                }
            }
        }
        for c in &mut self.coeffs {
            if *c < 0.0 {
                *c = 0.0;
            }
        }
    }

    /// Rescales the weights to sum to one. The point is re-derived from the
    /// weights only when it has drifted past `snap_tol`.
    pub(crate) fn renormalize(&mut self, s: &PointSet, snap_tol: f64) {
        let sum: f64 = self.coeffs.iter().sum();
        if sum > 0.0 && sum != 1.0 {
            self.coeffs.iter_mut().for_each(|c| *c /= sum);
        }
        if self.reconstruction_error(s) > snap_tol {
            let fresh = self.reconstruct(s);
            self.point.coords_mut().copy_from_slice(&fresh);
        }
    }
}

fn target_point<'a>(s: &'a PointSet, to: Toward<'a>) -> &'a [f64] {
    match to {
        Toward::Vertex(j) => s.point(j),
        Toward::Iterate(other) => &other.point,
    }
}

fn combine(s: &PointSet, coeffs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; s.dim()];
    for (v, &c) in s.iter().zip(coeffs) {
        if c != 0.0 {
            for (o, x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(rows: &[&[f64]]) -> PointSet {
        PointSet::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn nearest_step_hits_midline() {
        let s = set(&[&[0.0, 0.0], &[2.0, 0.0]]);
        let mut it = ConvexIterate::at_vertex(&s, 0).unwrap();
        let alpha = it.step_nearest(&[1.0, 0.0], &s, 1);
        assert_eq!(alpha, 0.5);
        assert_eq!(it.point().coords(), &[1.0, 0.0]);
        assert_eq!(it.coeffs(), &[0.5, 0.5]);
        assert!(it.satisfies_invariants(&s));
    }

    #[test]
    fn nearest_step_clamps_to_vertex() {
        let s = set(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let mut it = ConvexIterate::at_vertex(&s, 0).unwrap();
        assert_eq!(it.step_nearest(&[3.0, 0.0], &s, 1), 1.0);
        assert_eq!(it.point().coords(), &[1.0, 0.0]);
        assert_eq!(it.coeffs(), &[0.0, 1.0]);
    }

    #[test]
    fn nearest_step_orthogonal_leaves_iterate() {
        let s = set(&[&[0.0, 1.0], &[2.0, 1.0]]);
        let mut it = ConvexIterate::at_vertex(&s, 0).unwrap();
        let before = it.clone();
        assert_eq!(it.step_nearest(&[0.0, 0.0], &s, 1), 0.0);
        assert_eq!(it, before);
    }

    #[test]
    fn midpoint_steps() {
        let s = set(&[&[0.0, 0.0], &[2.0, 0.0]]);
        let mut it = ConvexIterate::at_vertex(&s, 0).unwrap();
        it.step_midpoint(&s, 1);
        assert_eq!(it.point().coords(), &[1.0, 0.0]);
        assert_eq!(it.coeffs(), &[0.5, 0.5]);

        let s = set(&[&[0.0, 0.0], &[4.0, 0.0]]);
        let mut it = ConvexIterate::at_vertex(&s, 0).unwrap();
        it.step_midpoint(&s, 1);
        it.step_midpoint(&s, 1);
        assert_eq!(it.point().coords(), &[3.0, 0.0]);
        assert_eq!(it.coeffs(), &[0.25, 0.75]);
        assert_eq!(it.coeffs().iter().sum::<f64>(), 1.0);
        assert_eq!(it.reconstruct(&s), vec![3.0, 0.0]);
    }

    #[test]
    fn midpoint_toward_own_vertex_is_fixed() {
        let s = set(&[&[1.0, 2.0], &[4.0, 0.0]]);
        let mut it = ConvexIterate::at_vertex(&s, 0).unwrap();
        it.step_midpoint(&s, 0);
        assert_eq!(it, ConvexIterate::at_vertex(&s, 0).unwrap());
        it.step_midpoint(&s, 1);
        assert_ne!(it.point().coords(), s.point(0));
    }

    #[test]
    fn moves_toward_another_iterate() {
        let s = set(&[&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0]]);
        let a = ConvexIterate::at_vertex(&s, 0).unwrap();
        let mut b = ConvexIterate::at_vertex(&s, 1).unwrap();
        b.step_midpoint(&s, 2);
        let mut it = a.clone();
        it.midpoint_toward(&s, Toward::Iterate(&b));
        assert_eq!(it.point().coords(), &[0.5, 0.5]);
        assert_eq!(it.coeffs(), &[0.5, 0.25, 0.25]);
        assert!(it.satisfies_invariants(&s));
    }

    #[test]
    fn invariants_reject_tampering() {
        let s = set(&[&[0.0, 0.0], &[2.0, 0.0]]);
        let mut it = ConvexIterate::at_vertex(&s, 0).unwrap();
        it.step_midpoint(&s, 1);
        assert!(it.satisfies_invariants(&s));
        let mut bad = it.clone();
        bad.coeffs_mut()[0] = -0.5;
        assert!(!bad.satisfies_invariants(&s));
        let bad = ConvexIterate::from_parts(Point::new(vec![1.5, 0.0]).unwrap(), vec![0.5, 0.5]);
        assert!(!bad.satisfies_invariants(&s));
    }

    #[test]
    fn renormalize_fixes_sum() {
        let s = set(&[&[0.0, 0.0], &[2.0, 0.0]]);
        let mut it = ConvexIterate::from_parts(Point::new(vec![1.0, 0.0]).unwrap(), vec![0.6, 0.6]);
        it.renormalize(&s, 1e-9);
        assert!((it.coeffs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(it.satisfies_invariants(&s));
    }
}
