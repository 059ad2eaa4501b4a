use super::{
    certify_witness, init_iterate, Action, Certification, Run, RunOutcome, SolverConfig, Status,
    Target,
};
use crate::error::Result;
use crate::geometry::PointSet;
use crate::rng::{RngStream, STREAM_COIN};

/// Greedy-randomized variant: after each pivot scan a coin picks either the
/// midpoint toward the pivot or the nearest-point step. The closest iterate
/// seen so far is kept as the incumbent and is what gets reported.
pub fn solve_greedy_random(p: &[f64], s: &PointSet, cfg: &SolverConfig) -> Result<RunOutcome> {
    let mut run = Run::start(p, s, cfg)?;
    let mut coin = RngStream::new(cfg.seed, STREAM_COIN);
    let mut it = init_iterate(p, s)?;
    let mut best = it.clone();
    let mut best_d2 = run.dist2(&best);
    loop {
        if best_d2 <= run.thresh2 {
            return Ok(run.finish(Status::Approximate, best.clone(), best));
        }
        if run.iterations >= run.cap {
            return Ok(run.finish(Status::IterLimit, best.clone(), best));
        }
        let (found, fallback) = run.scan(&it);
        let pivot = match found {
            Some(i) => i,
            None => match certify_witness(p, s, it.point()) {
                Certification::Witness => return Ok(run.finish(Status::Witness, it, best)),
                Certification::Tie(i) => i,
            },
        };
        run.iterations += 1;
        let (action, alpha) = if cfg.midpoint_prob > 0.0 && coin.coin(cfg.midpoint_prob) {
            it.step_midpoint(s, pivot);
            (Action::Midpoint, 0.5)
        } else {
            (Action::Nearest, it.step_nearest(p, s, pivot))
        };
        run.maintain(&mut it);
        let d2 = run.dist2(&it);
        if d2 < best_d2 {
            best.clone_from(&it);
            best_d2 = d2;
        }
        run.record(action, Target::Vertex(pivot), alpha, &it, &best, fallback);
    }
}
