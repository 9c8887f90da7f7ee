//! Tabu search over the single-flip neighborhood.
//!
//! Per read: random initial bits, then best-improvement moves over all `n`
//! flips evaluated through the cached fields. A flipped variable becomes
//! tabu for `tenure` iterations unless aspiration applies (a tabu flip that
//! would produce a new read-best energy is always admissible); when every
//! move is tabu without aspiration, the move whose tabu expires earliest is
//! taken. A read stops at the wall-clock timeout or after
//! `stagnation_limit` non-improving iterations, whichever comes first; the
//! timeout makes results wall-clock dependent, so disable it
//! (`timeout_ms = 0`) when reproducibility matters.

use std::time::Instant;

use crate::error::Result;
use crate::matrix::{BitVector, QuboMatrix};
use crate::rng::Rng;
use crate::solvers::{
    reduce_reads, run_reads, CancelToken, ReadOutcome, ResolvedTabu, SolveResult, SolverConfig,
};
use crate::state::EnergyState;

pub fn tabu_search(q: &QuboMatrix, cfg: &SolverConfig) -> Result<SolveResult> {
    tabu_search_cancellable(q, cfg, &CancelToken::none())
}

pub(crate) fn tabu_search_cancellable(
    q: &QuboMatrix,
    cfg: &SolverConfig,
    cancel: &CancelToken,
) -> Result<SolveResult> {
    cfg.validate()?;
    let start = Instant::now();
    let n = q.num_vars();
    let params = cfg.resolved_tabu(n);

    let (outcomes, best) = run_reads(cfg.reads, |read| {
        let mut rng = Rng::from_stream(cfg.seed, read as u64);
        let state = EnergyState::new(q, BitVector::random(n, &mut rng))?;
        let r = tabu_read(q, &params, state, cancel, |_| {})?;
        Ok(ReadOutcome {
            energy: r.best_energy,
            bits: r.best_bits,
            counters: vec![
                ("iterations", r.iterations),
                ("timeout_stops", r.timeout_hit as u64),
            ],
        })
    })?;

    Ok(reduce_reads(
        "ts",
        outcomes,
        best,
        start.elapsed(),
        [
            ("tenure".to_string(), serde_json::json!(params.tenure)),
            (
                "stagnation_limit".to_string(),
                serde_json::json!(params.stagnation),
            ),
        ],
    ))
}

pub(crate) struct TabuReadResult {
    pub best_energy: f64,
    pub best_bits: BitVector,
    pub iterations: u64,
    pub timeout_hit: bool,
}

/// One tabu read from a given start state. `on_move` observes the current
/// energy after every applied move (used by tests to trace the search).
pub(crate) fn tabu_read(
    q: &QuboMatrix,
    params: &ResolvedTabu,
    mut state: EnergyState,
    cancel: &CancelToken,
    mut on_move: impl FnMut(f64),
) -> Result<TabuReadResult> {
    let n = q.num_vars();
    let deadline = params.timeout.map(|t| Instant::now() + t);
    // Long walks revisit states in cycles whose incremental updates can
    // carry a directional rounding residue; rebuilding the cache keeps the
    // drift bounded, and the improvement guard below stops that dust from
    // registering as endless new bests (which would defeat the stagnation
    // stop).
    let resync_every = 1024.max(n as u64);
    let mut expires = vec![0u64; n];
    let mut best_energy = state.energy();
    let mut best_bits = state.bits().clone();
    let mut iter: u64 = 0;
    let mut since_improve = 0usize;
    let mut timeout_hit = false;

    loop {
        if since_improve >= params.stagnation {
            break;
        }
        if let Some(deadline) = deadline {
            if Instant::now() >= deadline {
                timeout_hit = true;
                break;
            }
        }
        cancel.bail_if_cancelled()?;

        let mut chosen: Option<(usize, f64)> = None;
        for i in 0..n {
            let delta = state.flip_delta(i);
            let admissible = expires[i] <= iter || state.energy() + delta < best_energy;
            if admissible && chosen.is_none_or(|(_, d)| delta < d) {
                chosen = Some((i, delta));
            }
        }
        let i = match chosen {
            Some((i, _)) => i,
            None => {
                // everything tabu and nothing aspirates: earliest expiry wins
                let mut earliest = 0;
                for i in 1..n {
                    if expires[i] < expires[earliest] {
                        earliest = i;
                    }
                }
                earliest
            }
        };
        state.apply_flip(q, i);
        expires[i] = iter + 1 + params.tenure as u64;
        iter += 1;
        if iter % resync_every == 0 {
            state = EnergyState::new(q, state.bits().clone())?;
            best_energy = q.energy(&best_bits)?;
        }
        on_move(state.energy());
        let guard = 1e-10 * (1.0 + best_energy.abs());
        if state.energy() < best_energy - guard {
            best_energy = state.energy();
            best_bits = state.bits().clone();
            since_improve = 0;
        } else {
            since_improve += 1;
        }
    }

    Ok(TabuReadResult {
        best_energy,
        best_bits,
        iterations: iter,
        timeout_hit,
    })
}
