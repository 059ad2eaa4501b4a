//! Convex hull membership by the triangle algorithm and its randomized
//! variants.
//!
//! Given `S = {v_1, ..., v_n} ⊂ ℝᵐ`, a query point `p` and a tolerance
//! `ε ∈ (0, 1)`, every solver either returns a point of `conv(S)` within
//! `εR` of `p` (with explicit convex weights), or a witness point whose
//! perpendicular bisector with `p` separates `p` from `conv(S)`.
//!
//! The crate also ships the chaos-game point-cloud generator, seeded instance
//! generators with known ground truth, and a benchmark harness for
//! iteration-count scaling sweeps.

pub mod bench;
pub mod chaos;
pub mod error;
pub mod geometry;
pub mod instances;
pub mod io;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use geometry::{PivotStrategy, Point, PointSet};
pub use solvers::{
    solve, verify_outcome, ConvexIterate, RunOutcome, SolverConfig, Status, Variant,
};
