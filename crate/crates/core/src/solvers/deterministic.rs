use super::{
    certify_witness, init_iterate, Action, Certification, Run, RunOutcome, SolverConfig, Status,
    Target,
};
use crate::error::Result;
use crate::geometry::PointSet;

/// The triangle algorithm: repeat nearest-point steps toward pivots until
/// `d(p, p') <= εR` or no pivot exists.
pub fn solve_deterministic(p: &[f64], s: &PointSet, cfg: &SolverConfig) -> Result<RunOutcome> {
    let mut run = Run::start(p, s, cfg)?;
    let mut it = init_iterate(p, s)?;
    loop {
        if run.dist2(&it) <= run.thresh2 {
            let best = it.clone();
            return Ok(run.finish(Status::Approximate, it, best));
        }
        if run.iterations >= run.cap {
            let best = it.clone();
            return Ok(run.finish(Status::IterLimit, it, best));
        }
        let (found, fallback) = run.scan(&it);
        let pivot = match found {
            Some(i) => i,
            None => match certify_witness(p, s, it.point()) {
                Certification::Witness => {
                    let best = it.clone();
                    return Ok(run.finish(Status::Witness, it, best));
                }
                Certification::Tie(i) => i,
            },
        };
        run.iterations += 1;
        let alpha = it.step_nearest(p, s, pivot);
        run.maintain(&mut it);
        run.record(
            Action::Nearest,
            Target::Vertex(pivot),
            alpha,
            &it,
            &it,
            fallback,
        );
    }
}
