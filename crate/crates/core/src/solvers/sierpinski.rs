//! Chaos-game driven variants.
//!
//! Each iteration draws `v` uniformly from `S ∪ {p*}`. A pivot draw takes a
//! coin-selected midpoint or nearest step; a non-pivot vertex draw takes a
//! chaos-game midpoint move. Drawing a non-pivot incumbent jumps back to
//! `p*`, and what happens next depends on the variant:
//!
//! * `Sierpinski` scans for a pivot at `p*` (the only `O(mn)` branch).
//! * `SierpinskiRelaxed` draws `v'` at random instead of scanning.
//! * `SierpinskiFree` never jumps; `p*` is treated like any vertex.
//!
//! The relaxed and free variants never scan on the hot path, so they audit
//! the incumbent with a full scan whenever it has gone `n + 1` iterations
//! without improving. That audit is what lets them report a witness.

use super::iterate::Toward;
use super::{
    certify_witness, init_iterate, Action, Certification, ConvexIterate, Run, RunOutcome,
    SolverConfig, Status, Target, Variant,
};
use crate::error::{Error, Result};
use crate::geometry::{PivotStrategy, PivotTest, PointSet};
use crate::rng::{RngStream, STREAM_COIN, STREAM_JUMP, STREAM_VERTEX};

pub fn solve_sierpinski(p: &[f64], s: &PointSet, cfg: &SolverConfig) -> Result<RunOutcome> {
    if !matches!(
        cfg.variant,
        Variant::Sierpinski | Variant::SierpinskiRelaxed | Variant::SierpinskiFree
    ) {
        return Err(Error::InvalidParameter(format!(
            "variant {} is not a Sierpinski variant",
            cfg.variant
        )));
    }
    let mut run = Run::start(p, s, cfg)?;
    let mut pick = RngStream::new(cfg.seed, STREAM_VERTEX);
    let mut coin = RngStream::new(cfg.seed, STREAM_COIN);
    let mut jump = RngStream::new(cfg.seed, STREAM_JUMP);
    let n = s.len();
    let audit_after = n as u64 + 1;

    let mut it = init_iterate(p, s)?;
    let mut best = it.clone();
    let mut it_d2 = run.dist2(&it);
    let mut best_d2 = it_d2;
    let mut stale = 0u64;

    loop {
        if it_d2.min(best_d2) <= run.thresh2 {
            let out = if it_d2 < best_d2 {
                it.clone()
            } else {
                best.clone()
            };
            return Ok(run.finish(Status::Approximate, out, best));
        }
        if run.iterations >= run.cap {
            return Ok(run.finish(Status::IterLimit, best.clone(), best));
        }
        run.iterations += 1;

        let k = pick.index(n + 1);
        let (target, toward) = if k < n {
            (Target::Vertex(k), Toward::Vertex(k))
        } else {
            (Target::Incumbent, Toward::Iterate(&best))
        };
        let target_point: &[f64] = match toward {
            Toward::Vertex(j) => s.point(j),
            Toward::Iterate(b) => b.point(),
        };
        let is_pivot = PivotTest::new(p, it.point()).is_pivot(target_point);

        let mut fallback = false;
        let (action, recorded_target, alpha) = if is_pivot {
            if coin.coin(cfg.midpoint_prob) {
                it.midpoint_toward(s, toward);
                (Action::Midpoint, target, 0.5)
            } else {
                (Action::Nearest, target, it.nearest_toward(p, s, toward))
            }
        } else if k == n && cfg.variant != Variant::SierpinskiFree {
            it.clone_from(&best);
            match cfg.variant {
                Variant::Sierpinski => {
                    let (found, fb) = run.scan(&it);
                    fallback = fb;
                    let j = match found {
                        Some(j) => j,
                        None => match certify_witness(p, s, it.point()) {
                            Certification::Witness => {
                                return Ok(run.finish(Status::Witness, it, best));
                            }
                            Certification::Tie(j) => j,
                        },
                    };
                    let alpha = it.step_nearest(p, s, j);
                    (Action::JumpNearest, Target::Vertex(j), alpha)
                }
                _ => {
                    let j = jump.index(n);
                    if PivotTest::new(p, it.point()).is_pivot(s.point(j)) {
                        let alpha = it.step_nearest(p, s, j);
                        (Action::JumpNearest, Target::Vertex(j), alpha)
                    } else {
                        it.step_midpoint(s, j);
                        (Action::JumpMidpoint, Target::Vertex(j), 0.5)
                    }
                }
            }
        } else {
            it.midpoint_toward(s, toward);
            (Action::Midpoint, target, 0.5)
        };

        run.maintain(&mut it);
        it_d2 = run.dist2(&it);
        if it_d2 < best_d2 {
            best.clone_from(&it);
            best_d2 = it_d2;
            stale = 0;
        } else {
            stale += 1;
        }
        run.record(action, recorded_target, alpha, &it, &best, fallback);

        if cfg.variant != Variant::Sierpinski && stale >= audit_after {
            stale = 0;
            if let Some(witness) = audit(&mut run, &best) {
                return Ok(run.finish(Status::Witness, witness, best));
            }
        }
    }
}

/// Full scan at the incumbent; returns it when it certifies as a witness.
fn audit(run: &mut Run<'_>, best: &ConvexIterate) -> Option<ConvexIterate> {
    run.pivot_scans += 1;
    let test = PivotTest::new(run.p, best.point());
    if test.find(run.s, PivotStrategy::FirstIndex).is_some() {
        return None;
    }
    match certify_witness(run.p, run.s, best.point()) {
        Certification::Witness => Some(best.clone()),
        Certification::Tie(_) => None,
    }
}
