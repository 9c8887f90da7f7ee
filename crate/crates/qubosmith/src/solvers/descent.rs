//! Steepest descent: greedy best-single-flip local minimization.
//!
//! Per read: random initial bits, then repeatedly flip the variable with the
//! most negative flip delta (lowest index on ties) until no flip lowers the
//! energy. The returned assignment is a 1-flip local minimum; the result is
//! best-of-reads.

use std::time::Instant;

use crate::error::Result;
use crate::matrix::{BitVector, QuboMatrix};
use crate::rng::Rng;
use crate::solvers::{
    reduce_reads, run_reads, CancelToken, ReadOutcome, SolveResult, SolverConfig,
};
use crate::state::EnergyState;

pub fn steepest_descent(q: &QuboMatrix, cfg: &SolverConfig) -> Result<SolveResult> {
    steepest_descent_cancellable(q, cfg, &CancelToken::none())
}

pub(crate) fn steepest_descent_cancellable(
    q: &QuboMatrix,
    cfg: &SolverConfig,
    cancel: &CancelToken,
) -> Result<SolveResult> {
    cfg.validate()?;
    let start = Instant::now();
    let n = q.num_vars();

    let (outcomes, best) = run_reads(cfg.reads, |read| {
        let mut rng = Rng::from_stream(cfg.seed, read as u64);
        let mut state = EnergyState::new(q, BitVector::random(n, &mut rng))?;
        let mut flips = 0u64;
        loop {
            cancel.bail_if_cancelled()?;
            let mut chosen = usize::MAX;
            let mut best_delta = 0.0;
            for i in 0..n {
                let d = state.flip_delta(i);
                // strict < keeps the first index on ties
                if d < best_delta {
                    best_delta = d;
                    chosen = i;
                }
            }
            if chosen == usize::MAX {
                break; // 1-flip local minimum
            }
            state.apply_flip(q, chosen);
            flips += 1;
        }
        Ok(ReadOutcome {
            energy: state.energy(),
            bits: state.bits().clone(),
            counters: vec![("descent_flips", flips)],
        })
    })?;

    Ok(reduce_reads("sd", outcomes, best, start.elapsed(), []))
}
