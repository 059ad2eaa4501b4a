//! Triangle-algorithm solvers.
//!
//! Every variant returns a [`RunOutcome`] that certifies itself: an
//! approximate solution carries barycentric weights over `S`, and a witness
//! carries a point whose bisector with `p` separates `p` from `conv(S)`.

mod deterministic;
mod greedy;
mod iterate;
mod sierpinski;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sq_dist, witness_holds, PivotStrategy, PivotTest, PointSet};

pub use deterministic::solve_deterministic;
pub use greedy::solve_greedy_random;
pub use iterate::{ConvexIterate, COEFF_NEG_TOL, COEFF_SUM_TOL, RECONSTRUCTION_TOL};
pub use sierpinski::solve_sierpinski;

/// Iterations between coefficient renormalisations.
pub const RENORMALIZE_EVERY: u64 = 1024;
/// Drift past which the point is re-derived from its weights.
const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    Deterministic,
    GreedyRandom,
    Sierpinski,
    SierpinskiRelaxed,
    SierpinskiFree,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Deterministic,
        Variant::GreedyRandom,
        Variant::Sierpinski,
        Variant::SierpinskiRelaxed,
        Variant::SierpinskiFree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Deterministic => "det",
            Variant::GreedyRandom => "greedy",
            Variant::Sierpinski => "sierpinski",
            Variant::SierpinskiRelaxed => "sierpinski-relaxed",
            Variant::SierpinskiFree => "sierpinski-free",
        }
    }

    pub fn is_randomized(self) -> bool {
        self != Variant::Deterministic
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown variant `{s}`")))
    }
}

impl PivotStrategy {
    pub fn name(self) -> &'static str {
        match self {
            PivotStrategy::FirstIndex => "first",
            PivotStrategy::BestGap => "best",
            PivotStrategy::StrictFirst => "strict",
        }
    }
}

impl fmt::Display for PivotStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PivotStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(PivotStrategy::FirstIndex),
            "best" => Ok(PivotStrategy::BestGap),
            "strict" => Ok(PivotStrategy::StrictFirst),
            _ => Err(Error::InvalidParameter(format!(
                "unknown pivot strategy `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub variant: Variant,
    pub pivot_strategy: PivotStrategy,
    pub seed: u64,
    /// `None` selects `10 * ceil(1/ε²) * n`.
    pub max_iters: Option<u64>,
    pub midpoint_prob: f64,
    pub record_trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 1e-3,
            variant: Variant::Deterministic,
            pivot_strategy: PivotStrategy::FirstIndex,
            seed: 0,
            max_iters: None,
            midpoint_prob: 0.5,
            record_trace: false,
        }
    }
}

impl SolverConfig {
    pub fn new(variant: Variant, epsilon: f64) -> Self {
        SolverConfig {
            variant,
            epsilon,
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_pivot(mut self, strategy: PivotStrategy) -> Self {
        self.pivot_strategy = strategy;
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.record_trace = on;
        self
    }

    pub fn with_max_iters(mut self, cap: u64) -> Self {
        self.max_iters = Some(cap);
        self
    }

    pub fn with_midpoint_prob(mut self, prob: f64) -> Self {
        self.midpoint_prob = prob;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidEpsilon(self.epsilon));
        }
        if !(0.0..=1.0).contains(&self.midpoint_prob) {
            return Err(Error::InvalidParameter(format!(
                "midpoint_prob must lie in [0, 1], got {}",
                self.midpoint_prob
            )));
        }
        if self.max_iters == Some(0) {
            return Err(Error::InvalidParameter("max_iters must be positive".into()));
        }
        Ok(())
    }

    pub fn iteration_cap(&self, n: usize) -> u64 {
        self.max_iters.unwrap_or_else(|| {
            let inv = (1.0 / (self.epsilon * self.epsilon)).ceil() as u64;
            10u64.saturating_mul(inv).saturating_mul(n as u64)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Approximate,
    Witness,
    IterLimit,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Approximate => "approximate",
            Status::Witness => "witness",
            Status::IterLimit => "iter-limit",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    /// `p' <- nearest(p; p' v)`.
    Nearest,
    /// `p' <- (p' + v) / 2`.
    Midpoint,
    /// Jump to the incumbent, then a nearest step from it.
    JumpNearest,
    /// Jump to the incumbent, then a midpoint step (relaxed variant, non-pivot draw).
    JumpMidpoint,
}

/// What the chosen target of a step was.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    Vertex(usize),
    Incumbent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: u64,
    pub action: Action,
    pub target: Target,
    pub alpha: f64,
    /// `d(p, p')` after the step.
    pub distance: f64,
    pub incumbent_distance: f64,
    /// A strict pivot was requested but only a non-strict one existed.
    pub strict_fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub status: Status,
    /// The reported iterate: the approximate solution, the witness point, or
    /// the best iterate at the cap.
    pub final_iterate: ConvexIterate,
    pub incumbent: ConvexIterate,
    pub iterations: u64,
    pub pivot_scans: u64,
    pub strict_fallbacks: u64,
    pub elapsed: Duration,
    pub radius: f64,
    pub final_distance: f64,
    pub gap_bounds: Option<(f64, f64)>,
    pub trace: Option<Vec<TraceRecord>>,
}

impl RunOutcome {
    pub fn threshold(&self, epsilon: f64) -> f64 {
        epsilon * self.radius
    }
}

/// `p' = argmin_v d(p, v)`, lowest index on ties.
pub fn init_iterate(p: &[f64], s: &PointSet) -> Result<ConvexIterate> {
    s.check_dim(p)?;
    let mut best = (0, f64::INFINITY);
    for (i, v) in s.iter().enumerate() {
        let d = sq_dist(p, v);
        if d < best.1 {
            best = (i, d);
        }
    }
    ConvexIterate::at_vertex(s, best.0)
}

/// Runs the variant selected in `cfg`.
pub fn solve(p: &[f64], s: &PointSet, cfg: &SolverConfig) -> Result<RunOutcome> {
    match cfg.variant {
        Variant::Deterministic => solve_deterministic(p, s, cfg),
        Variant::GreedyRandom => solve_greedy_random(p, s, cfg),
        Variant::Sierpinski | Variant::SierpinskiRelaxed | Variant::SierpinskiFree => {
            solve_sierpinski(p, s, cfg)
        }
    }
}

/// Re-checks the certificate carried by an outcome.
pub fn verify_outcome(p: &[f64], s: &PointSet, out: &RunOutcome, cfg: &SolverConfig) -> bool {
    if s.check_dim(p).is_err() || !out.incumbent.satisfies_invariants(s) {
        return false;
    }
    match out.status {
        Status::Approximate => {
            let r2 = crate::geometry::max_sq_dist(p, s);
            let thresh = cfg.epsilon * r2.sqrt();
            out.final_iterate.satisfies_invariants(s)
                && sq_dist(p, out.final_iterate.point()) <= thresh * thresh
        }
        Status::Witness => {
            out.final_iterate.satisfies_invariants(s)
                && witness_holds(p, out.final_iterate.point(), s)
        }
        Status::IterLimit => true,
    }
}

/// Mutable bookkeeping shared by the solver loops.
pub(crate) struct Run<'a> {
    pub p: &'a [f64],
    pub s: &'a PointSet,
    pub cfg: &'a SolverConfig,
    pub radius: f64,
    pub thresh2: f64,
    pub cap: u64,
    pub iterations: u64,
    pub pivot_scans: u64,
    pub strict_fallbacks: u64,
    pub trace: Option<Vec<TraceRecord>>,
    timer: Timer,
}

impl<'a> Run<'a> {
    pub fn start(p: &'a [f64], s: &'a PointSet, cfg: &'a SolverConfig) -> Result<Self> {
        cfg.validate()?;
        s.check_dim(p)?;
        let r2 = crate::geometry::max_sq_dist(p, s);
        let radius = r2.sqrt();
        let thresh = cfg.epsilon * radius;
        Ok(Run {
            p,
            s,
            cfg,
            radius,
            thresh2: thresh * thresh,
            cap: cfg.iteration_cap(s.len()),
            iterations: 0,
            pivot_scans: 0,
            strict_fallbacks: 0,
            trace: cfg.record_trace.then(Vec::new),
            timer: Timer::start(),
        })
    }

    pub fn dist2(&self, it: &ConvexIterate) -> f64 {
        sq_dist(self.p, it.point())
    }

    /// Full pivot scan at `at` using the configured strategy. A requested
    /// strict pivot falls back to any pivot; the flag reports that.
    pub fn scan(&mut self, at: &ConvexIterate) -> (Option<usize>, bool) {
        self.pivot_scans += 1;
        let test = PivotTest::new(self.p, at.point());
        match test.find(self.s, self.cfg.pivot_strategy) {
            Some(i) => (Some(i), false),
            None if self.cfg.pivot_strategy == PivotStrategy::StrictFirst => {
                self.pivot_scans += 1;
                let found = test.find(self.s, PivotStrategy::FirstIndex);
                if found.is_some() {
                    self.strict_fallbacks += 1;
                }
                (found, found.is_some())
            }
            None => (None, false),
        }
    }

    pub fn record(
        &mut self,
        action: Action,
        target: Target,
        alpha: f64,
        current: &ConvexIterate,
        incumbent: &ConvexIterate,
        strict_fallback: bool,
    ) {
        if self.trace.is_none() {
            return;
        }
        let rec = TraceRecord {
            iteration: self.iterations,
            action,
            target,
            alpha,
            distance: self.dist2(current).sqrt(),
            incumbent_distance: self.dist2(incumbent).sqrt(),
            strict_fallback,
        };
        if let Some(t) = self.trace.as_mut() {
            t.push(rec);
        }
    }

    pub fn maintain(&self, it: &mut ConvexIterate) {
        if self.iterations.is_multiple_of(RENORMALIZE_EVERY) {
            it.renormalize(self.s, SNAP_TOL);
        }
    }

    pub fn finish(
        self,
        status: Status,
        final_iterate: ConvexIterate,
        incumbent: ConvexIterate,
    ) -> RunOutcome {
        let final_distance = sq_dist(self.p, final_iterate.point()).sqrt();
        let gap_bounds =
            (status == Status::Witness).then(|| (final_distance / 2.0, final_distance));
        RunOutcome {
            status,
            final_iterate,
            incumbent,
            iterations: self.iterations,
            pivot_scans: self.pivot_scans,
            strict_fallbacks: self.strict_fallbacks,
            elapsed: self.timer.elapsed(),
            radius: self.radius,
            final_distance,
            gap_bounds,
            trace: self.trace,
        }
    }
}

/// Outcome of re-checking a point that has no pivot.
pub(crate) enum Certification {
    Witness,
    /// Some `v_i` sits at equal distance; it is used as a pivot instead.
    Tie(usize),
}

pub(crate) fn certify_witness(p: &[f64], s: &PointSet, at: &[f64]) -> Certification {
    match s.iter().position(|v| sq_dist(at, v) >= sq_dist(p, v)) {
        None => Certification::Witness,
        Some(i) => Certification::Tie(i),
    }
}

#[cfg(not(target_arch = "wasm32"))]
struct Timer(std::time::Instant);

#[cfg(not(target_arch = "wasm32"))]
impl Timer {
    fn start() -> Self {
        Timer(std::time::Instant::now())
    }

    fn elapsed(&self) -> Duration {
        self.0.elapsed()
    }
}

#[cfg(target_arch = "wasm32")]
struct Timer;

#[cfg(target_arch = "wasm32")]
impl Timer {
    fn start() -> Self {
        Timer
    }

    fn elapsed(&self) -> Duration {
        Duration::ZERO
    }
}
