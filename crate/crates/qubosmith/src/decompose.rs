//! Decomposition meta-solver: split a large QUBO into clamped sub-QUBOs of
//! a fixed size, solve each with an inner solver, adopt strict improvements
//! and iterate to convergence.
//!
//! Clamping: for a variable subset `S` and a full assignment `x`, the
//! sub-QUBO keeps the couplers internal to `S`, folds frozen interactions
//! into the subset diagonals (`Q'_aa = Q_ii + sum_{k not in S} c_ik x_k`)
//! and carries a constant `offset` so that for every sub-assignment `y`,
//! `energy(sub_q, y) + offset = energy(Q, merge(y))` exactly.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{BitVector, QuboBuilder, QuboMatrix};
use crate::rng::{Rng, DECOMPOSITION_STREAM};
use crate::solvers::{
    solve_with_cancel, CancelToken, SolveResult, SolverConfig, SolverKind,
    DEFAULT_ENUMERATION_CAP,
};
use crate::state::EnergyState;

/// A clamped sub-QUBO over a variable subset.
#[derive(Clone, Debug)]
pub struct SubProblem {
    /// Global indices, in local-variable order.
    pub subset: Vec<usize>,
    pub sub_q: QuboMatrix,
    /// Constant such that `energy(sub_q, y) + offset = energy(Q, merge(y))`.
    pub offset: f64,
    /// The full assignment the subproblem was clamped against.
    pub frozen: BitVector,
}

impl SubProblem {
    /// Full assignment with the subset positions replaced by `y`.
    pub fn merge(&self, y: &BitVector) -> Result<BitVector> {
        if y.len() != self.subset.len() {
            return Err(Error::DimensionMismatch {
                expected: self.subset.len(),
                got: y.len(),
            });
        }
        let mut merged = self.frozen.clone();
        for (a, &i) in self.subset.iter().enumerate() {
            merged.set(i, y.get(a));
        }
        Ok(merged)
    }

    /// Restriction of the clamping assignment to the subset.
    pub fn frozen_restriction(&self) -> BitVector {
        let bits: Vec<u8> = self.subset.iter().map(|&i| self.frozen.get(i)).collect();
        BitVector::from_bits(&bits)
    }
}

/// Builds the clamped sub-QUBO of `subset` against assignment `x`.
/// The offset is computed from a from-scratch evaluation with the subset
/// zeroed, so the decomposition identity holds to full precision.
pub fn build_sub_qubo(q: &QuboMatrix, x: &BitVector, subset: &[usize]) -> Result<SubProblem> {
    if x.len() != q.num_vars() {
        return Err(Error::DimensionMismatch {
            expected: q.num_vars(),
            got: x.len(),
        });
    }
    validate_subset(q.num_vars(), subset)?;

    let mut in_subset = vec![false; q.num_vars()];
    for &i in subset {
        in_subset[i] = true;
    }
    // x with the subset zeroed: its energy is exactly the frozen-frozen
    // contribution, and its local fields restricted to the subset are the
    // clamped diagonals
    let mut cleared = x.clone();
    for &i in subset {
        cleared.set(i, 0);
    }
    let offset = q.energy(&cleared)?;

    let s = subset.len();
    let mut builder = QuboBuilder::new(s)?;
    for (a, &i) in subset.iter().enumerate() {
        let mut diag = q.diagonal(i);
        q.for_each_neighbor(i, |k, c| {
            if !in_subset[k] && x.get(k) == 1 {
                diag += c;
            }
        });
        builder.add(a, a, diag)?;
        for (b, &j) in subset.iter().enumerate().skip(a + 1) {
            let c = q.coefficient(i, j);
            if c != 0.0 {
                builder.add(a, b, c)?;
            }
        }
    }
    Ok(SubProblem {
        subset: subset.to_vec(),
        sub_q: builder.build()?,
        offset,
        frozen: x.clone(),
    })
}

fn validate_subset(n: usize, subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::Config("subset must not be empty".into()));
    }
    let mut seen = vec![false; n];
    for &i in subset {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if seen[i] {
            return Err(Error::Config(format!("duplicate subset index {i}")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Variable-selection policy for forming subsets each round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    /// Rank variables by `|flip_delta|` descending (lowest index on ties)
    /// and cut the ranking into consecutive subsets.
    Impact,
    /// Shuffle the variables each round.
    Random,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecompositionConfig {
    pub sub_size: usize,
    pub inner: SolverKind,
    /// Inner-solver configuration; its `seed` field is ignored (per-solve
    /// seeds are drawn from the decomposition stream).
    pub inner_config: SolverConfig,
    /// Consecutive non-improving outer rounds before termination.
    pub stall_limit: usize,
    pub selection: Selection,
    pub seed: u64,
    /// Solve all subsets of a round against the round-start assignment in
    /// parallel, then adopt improvements in index order, re-validating each
    /// against the current assignment. Identical results for a given seed.
    pub parallel: bool,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        Self {
            sub_size: 30,
            inner: SolverKind::TabuSearch,
            // a full 1,000-read budget per subproblem is prohibitive at
            // ceil(n / 30) subproblems per round
            inner_config: SolverConfig {
                reads: 50,
                ..SolverConfig::default()
            },
            stall_limit: 3,
            selection: Selection::Impact,
            seed: 0,
            parallel: false,
        }
    }
}

impl DecompositionConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.sub_size < 1 || self.sub_size > n {
            return Err(Error::Config(format!(
                "sub_size must be in 1..={n}, got {}",
                self.sub_size
            )));
        }
        if self.stall_limit < 1 {
            return Err(Error::Config("stall_limit must be >= 1".into()));
        }
        if self.inner == SolverKind::BruteForce && self.sub_size > DEFAULT_ENUMERATION_CAP {
            return Err(Error::Config(format!(
                "sub_size {} exceeds the brute-force cap of {DEFAULT_ENUMERATION_CAP}",
                self.sub_size
            )));
        }
        self.inner_config.validate()
    }

    pub fn solver_id(&self) -> String {
        format!("qbsolv-like:{}", self.inner.id())
    }
}

pub fn solve_decomposed(q: &QuboMatrix, cfg: &DecompositionConfig) -> Result<SolveResult> {
    solve_decomposed_cancellable(q, cfg, &CancelToken::none())
}

pub fn solve_decomposed_cancellable(
    q: &QuboMatrix,
    cfg: &DecompositionConfig,
    cancel: &CancelToken,
) -> Result<SolveResult> {
    let start = std::time::Instant::now();
    let n = q.num_vars();
    cfg.validate(n)?;

    let mut driver = Rng::from_stream(cfg.seed, DECOMPOSITION_STREAM);
    let mut state = EnergyState::new(q, BitVector::random(n, &mut driver))?;
    let initial_energy = state.energy();
    // authoritative total, updated only by exact fresh improvements so the
    // accepted-energy trajectory is non-increasing by construction
    let mut current_total = initial_energy;

    let mut round_energies: Vec<f64> = Vec::new();
    let mut rounds = 0usize;
    let mut stall = 0usize;
    let mut adopted_total = 0u64;
    let mut subproblems_total = 0u64;

    while stall < cfg.stall_limit {
        cancel.bail_if_cancelled()?;
        rounds += 1;

        let mut order: Vec<usize> = (0..n).collect();
        match cfg.selection {
            Selection::Impact => {
                // highest |delta| first, lowest index on ties; sort is stable
                order.sort_by(|&a, &b| {
                    state
                        .flip_delta(b)
                        .abs()
                        .partial_cmp(&state.flip_delta(a).abs())
                        .unwrap()
                });
            }
            Selection::Random => driver.shuffle(&mut order),
        }
        let subsets: Vec<Vec<usize>> = order
            .chunks(cfg.sub_size)
            .map(|chunk| chunk.to_vec())
            .collect();
        let inner_seeds: Vec<u64> = (0..subsets.len()).map(|_| driver.next_u64()).collect();
        // one exactness spot-check per round on a random subset
        let checked_subset = driver.index(subsets.len());

        let mut improved = false;
        if cfg.parallel {
            let round_start = state.clone();
            let candidates: Vec<(SubProblem, SolveResult)> = subsets
                .par_iter()
                .zip(inner_seeds.par_iter())
                .enumerate()
                .map(|(t, (subset, &seed))| {
                    let sub = build_sub_qubo_from_state(q, &round_start, subset)?;
                    let result = solve_inner(&sub.sub_q, cfg, seed, cancel)
                        .map_err(|e| wrap_inner(rounds, t, e))?;
                    Ok((sub, result))
                })
                .collect::<Result<_>>()?;
            for (t, (_, result)) in candidates.iter().enumerate() {
                subproblems_total += 1;
                // re-validate against the current assignment
                let sub_now = build_sub_qubo_from_state(q, &state, &subsets[t])?;
                if t == checked_subset {
                    spot_check(q, &sub_now, &mut driver)?;
                }
                let e_cur = sub_now.sub_q.energy(&sub_now.frozen_restriction())?;
                let e_new = sub_now.sub_q.energy(&result.best_bits)?;
                if e_new < e_cur {
                    adopt(q, &mut state, &subsets[t], &result.best_bits);
                    current_total -= e_cur - e_new;
                    adopted_total += 1;
                    improved = true;
                }
            }
        } else {
            for (t, subset) in subsets.iter().enumerate() {
                cancel.bail_if_cancelled()?;
                subproblems_total += 1;
                let sub = build_sub_qubo_from_state(q, &state, subset)?;
                if t == checked_subset {
                    spot_check(q, &sub, &mut driver)?;
                }
                let e_cur = sub.sub_q.energy(&sub.frozen_restriction())?;
                let result = solve_inner(&sub.sub_q, cfg, inner_seeds[t], cancel)
                    .map_err(|e| wrap_inner(rounds, t, e))?;
                let e_new = sub.sub_q.energy(&result.best_bits)?;
                if e_new < e_cur {
                    adopt(q, &mut state, subset, &result.best_bits);
                    current_total -= e_cur - e_new;
                    adopted_total += 1;
                    improved = true;
                }
            }
        }

        round_energies.push(current_total);
        if improved {
            stall = 0;
        } else {
            stall += 1;
        }
    }

    let mut metadata = BTreeMap::new();
    metadata.insert("rounds".to_string(), serde_json::json!(rounds));
    metadata.insert(
        "round_energies".to_string(),
        serde_json::json!(round_energies),
    );
    metadata.insert(
        "initial_energy".to_string(),
        serde_json::json!(initial_energy),
    );
    metadata.insert("sub_size".to_string(), serde_json::json!(cfg.sub_size));
    metadata.insert(
        "subproblems_solved".to_string(),
        serde_json::json!(subproblems_total),
    );
    metadata.insert("adopted".to_string(), serde_json::json!(adopted_total));
    metadata.insert(
        "selection".to_string(),
        serde_json::json!(match cfg.selection {
            Selection::Impact => "impact",
            Selection::Random => "random",
        }),
    );

    Ok(SolveResult {
        solver_id: cfg.solver_id(),
        best_energy: current_total,
        best_bits: state.bits().clone(),
        read_energies: round_energies,
        solve_time: start.elapsed(),
        metadata,
    })
}

/// As [`build_sub_qubo`] but reuses the cached local fields:
/// `Q'_aa = f_i - sum_{k in S, k != i} c_ik x_k`, and the offset comes from
/// the clamping identity against the cached total instead of a from-scratch
/// pass.
fn build_sub_qubo_from_state(
    q: &QuboMatrix,
    state: &EnergyState,
    subset: &[usize],
) -> Result<SubProblem> {
    validate_subset(q.num_vars(), subset)?;
    let s = subset.len();
    let x = state.bits();
    let mut builder = QuboBuilder::new(s)?;
    let mut couplers: Vec<Vec<f64>> = vec![vec![0.0; s]; s];
    for (a, &i) in subset.iter().enumerate() {
        for (b, &j) in subset.iter().enumerate().skip(a + 1) {
            couplers[a][b] = q.coefficient(i, j);
        }
    }
    for (a, &i) in subset.iter().enumerate() {
        let mut diag = state.field(i);
        for (b, &j) in subset.iter().enumerate() {
            if b != a {
                let c = if a < b { couplers[a][b] } else { couplers[b][a] };
                if x.get(j) == 1 {
                    diag -= c;
                }
            }
        }
        builder.add(a, a, diag)?;
        for (b, _) in subset.iter().enumerate().skip(a + 1) {
            if couplers[a][b] != 0.0 {
                builder.add(a, b, couplers[a][b])?;
            }
        }
    }
    let sub_q = builder.build()?;
    let restriction: Vec<u8> = subset.iter().map(|&i| x.get(i)).collect();
    let e_sub = sub_q.energy(&BitVector::from_bits(&restriction))?;
    Ok(SubProblem {
        subset: subset.to_vec(),
        sub_q,
        offset: state.energy() - e_sub,
        frozen: x.clone(),
    })
}

fn solve_inner(
    sub_q: &QuboMatrix,
    cfg: &DecompositionConfig,
    seed: u64,
    cancel: &CancelToken,
) -> Result<SolveResult> {
    let mut inner_cfg = cfg.inner_config.clone();
    inner_cfg.seed = seed;
    solve_with_cancel(sub_q, cfg.inner, &inner_cfg, cancel)
}

fn wrap_inner(round: usize, subset: usize, source: Error) -> Error {
    match source {
        // cancellation is a run-level event, not a subproblem failure
        e @ Error::ResourceLimit(_) => e,
        other => Error::Decomposition {
            round,
            subset,
            source: Box::new(other),
        },
    }
}

fn adopt(q: &QuboMatrix, state: &mut EnergyState, subset: &[usize], y: &BitVector) {
    for (a, &i) in subset.iter().enumerate() {
        if state.bits().get(i) != y.get(a) {
            state.apply_flip(q, i);
        }
    }
}

/// Verifies `energy(sub_q, y) + offset = energy(Q, merge(y))` at one random
/// sub-assignment.
fn spot_check(q: &QuboMatrix, sub: &SubProblem, rng: &mut Rng) -> Result<()> {
    let y = BitVector::random(sub.subset.len(), rng);
    let lhs = sub.sub_q.energy(&y)? + sub.offset;
    let rhs = q.energy(&sub.merge(&y)?)?;
    if (lhs - rhs).abs() > 1e-8 {
        return Err(Error::Domain(format!(
            "clamping identity violated: {lhs} vs {rhs}"
        )));
    }
    Ok(())
}
