//! Parallel tempering with isoenergetic cluster moves.
//!
//! Replicas are laid out as `num_replicas / 2` temperature levels times two
//! chains per level; slot `2l + c` is chain `c` of level `l`. Inverse
//! temperatures sit on a geometric ladder between `1 / t_hot` and
//! `1 / t_cold` (probe-derived unless given explicitly). Each iteration:
//!
//! 1. every replica runs `sweeps` Metropolis sweeps at its level's beta;
//! 2. replica exchange between adjacent levels, chain by chain, accepted
//!    with probability `min(1, exp((beta_a - beta_b) (E_a - E_b)))`;
//! 3. one cluster move per level: pick a uniformly random site where the
//!    level's two chains disagree, flood-fill its cluster over stored
//!    couplers restricted to disagreement sites, swap the cluster's bits
//!    between the chains and accept via Metropolis on the pair's total
//!    energy change at that level's beta. On a fully stored (dense) matrix
//!    the disagreement subgraph is complete, so the cluster is the entire
//!    disagreement set.
//!
//! The result is the best state observed across all replicas (tracked at
//! sweep and move boundaries); `read_energies` carries one best energy per
//! replica slot.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::Result;
use crate::matrix::{BitVector, QuboMatrix, StorageKind};
use crate::rng::{Rng, CONTROLLER_STREAM};
use crate::solvers::{schedule_endpoints, CancelToken, SolveResult, SolverConfig};
use crate::state::EnergyState;

struct Replica {
    state: EnergyState,
    rng: Rng,
    best_energy: f64,
    best_bits: BitVector,
    accepted: u64,
}

impl Replica {
    fn observe(&mut self) {
        if self.state.energy() < self.best_energy {
            self.best_energy = self.state.energy();
            self.best_bits = self.state.bits().clone();
        }
    }
}

pub fn pt_icm(q: &QuboMatrix, cfg: &SolverConfig) -> Result<SolveResult> {
    pt_icm_cancellable(q, cfg, &CancelToken::none())
}

pub(crate) fn pt_icm_cancellable(
    q: &QuboMatrix,
    cfg: &SolverConfig,
    cancel: &CancelToken,
) -> Result<SolveResult> {
    cfg.validate()?;
    let start = Instant::now();
    let n = q.num_vars();
    let num_replicas = cfg.pticm.num_replicas;
    let levels = num_replicas / 2;

    let betas: Vec<f64> = match &cfg.pticm.beta_ladder {
        Some(ladder) => ladder.clone(),
        None => {
            let (t_hot, t_cold) = schedule_endpoints(q, cfg);
            let beta_min = 1.0 / t_hot;
            let beta_max = 1.0 / t_cold;
            let ratio = beta_max / beta_min;
            (0..levels)
                .map(|l| {
                    if levels == 1 {
                        beta_max
                    } else {
                        beta_min * ratio.powf(l as f64 / (levels - 1) as f64)
                    }
                })
                .collect()
        }
    };

    let mut replicas: Vec<Replica> = (0..num_replicas)
        .map(|slot| {
            let mut rng = Rng::from_stream(cfg.seed, slot as u64);
            let state = EnergyState::new(q, BitVector::random(n, &mut rng))?;
            Ok(Replica {
                best_energy: state.energy(),
                best_bits: state.bits().clone(),
                state,
                rng,
                accepted: 0,
            })
        })
        .collect::<Result<_>>()?;
    let mut controller = Rng::from_stream(cfg.seed, CONTROLLER_STREAM);

    let mut exchange_attempts = 0u64;
    let mut exchange_accepts = 0u64;
    let mut icm_attempts = 0u64;
    let mut icm_accepts = 0u64;
    let mut icm_skips = 0u64;

    for _ in 0..cfg.pticm.num_iterations {
        // 1. Metropolis sweeps, replicas independent
        replicas
            .par_iter_mut()
            .enumerate()
            .try_for_each(|(slot, rep)| -> Result<()> {
                let beta = betas[slot / 2];
                for _ in 0..cfg.sweeps {
                    cancel.bail_if_cancelled()?;
                    for i in 0..n {
                        let delta = rep.state.flip_delta(i);
                        if delta <= 0.0 || rep.rng.uniform() < (-delta * beta).exp() {
                            rep.state.apply_flip(q, i);
                            rep.accepted += 1;
                        }
                    }
                    rep.observe();
                }
                Ok(())
            })?;

        // 2. replica exchange between adjacent levels, per chain
        for chain in 0..2 {
            for l in 0..levels - 1 {
                let a = 2 * l + chain;
                let b = 2 * (l + 1) + chain;
                exchange_attempts += 1;
                let exponent = (betas[l] - betas[l + 1])
                    * (replicas[a].state.energy() - replicas[b].state.energy());
                let accept = exponent >= 0.0 || controller.uniform() < exponent.exp();
                if accept {
                    exchange_accepts += 1;
                    let (left, right) = replicas.split_at_mut(b);
                    std::mem::swap(&mut left[a].state, &mut right[0].state);
                    left[a].observe();
                    right[0].observe();
                }
            }
        }

        // 3. isoenergetic cluster move per level
        for l in 0..levels {
            cancel.bail_if_cancelled()?;
            let beta = betas[l];
            let (left, right) = replicas.split_at_mut(2 * l + 1);
            let rep_a = &mut left[2 * l];
            let rep_b = &mut right[0];

            let disagree: Vec<usize> = (0..n)
                .filter(|&i| rep_a.state.bits().get(i) != rep_b.state.bits().get(i))
                .collect();
            if disagree.is_empty() {
                icm_skips += 1;
                continue;
            }
            icm_attempts += 1;
            let seed_site = disagree[controller.index(disagree.len())];
            let cluster = disagreement_cluster(q, seed_site, &disagree);

            let snapshot_a = rep_a.state.clone();
            let snapshot_b = rep_b.state.clone();
            let mut pair_delta = 0.0;
            for &i in &cluster {
                pair_delta += rep_a.state.apply_flip(q, i);
                pair_delta += rep_b.state.apply_flip(q, i);
            }
            let exponent = -beta * pair_delta;
            let accept = exponent >= 0.0 || controller.uniform() < exponent.exp();
            if accept {
                icm_accepts += 1;
                rep_a.observe();
                rep_b.observe();
            } else {
                rep_a.state = snapshot_a;
                rep_b.state = snapshot_b;
            }
        }
    }

    // best across all replicas, lowest slot index on ties
    let mut best_slot = 0usize;
    for (slot, rep) in replicas.iter().enumerate() {
        if rep.best_energy < replicas[best_slot].best_energy {
            best_slot = slot;
        }
    }
    let read_energies: Vec<f64> = replicas.iter().map(|r| r.best_energy).collect();
    let total_accepted: u64 = replicas.iter().map(|r| r.accepted).sum();

    let mut metadata = BTreeMap::new();
    metadata.insert("beta_ladder".to_string(), serde_json::json!(betas));
    metadata.insert("num_levels".to_string(), serde_json::json!(levels));
    metadata.insert("num_replicas".to_string(), serde_json::json!(num_replicas));
    metadata.insert(
        "num_iterations".to_string(),
        serde_json::json!(cfg.pticm.num_iterations),
    );
    metadata.insert("accepted_moves".to_string(), serde_json::json!(total_accepted));
    metadata.insert(
        "exchange_attempts".to_string(),
        serde_json::json!(exchange_attempts),
    );
    metadata.insert(
        "exchange_accepts".to_string(),
        serde_json::json!(exchange_accepts),
    );
    metadata.insert("icm_attempts".to_string(), serde_json::json!(icm_attempts));
    metadata.insert("icm_accepts".to_string(), serde_json::json!(icm_accepts));
    metadata.insert("icm_skips".to_string(), serde_json::json!(icm_skips));

    Ok(SolveResult {
        solver_id: "pticm".to_string(),
        best_energy: read_energies[best_slot],
        best_bits: replicas[best_slot].best_bits.clone(),
        read_energies,
        solve_time: start.elapsed(),
        metadata,
    })
}

/// Connected component of `seed_site` in the disagreement subgraph: nodes
/// are disagreement sites, edges are stored couplers (whatever their value,
/// zero included). Dense matrices store every pair, so the component is the
/// whole disagreement set.
fn disagreement_cluster(q: &QuboMatrix, seed_site: usize, disagree: &[usize]) -> Vec<usize> {
    if q.storage_kind() == StorageKind::DenseUpperTriangular {
        return disagree.to_vec();
    }
    let n = q.num_vars();
    let mut is_disagree = vec![false; n];
    for &i in disagree {
        is_disagree[i] = true;
    }
    let mut in_cluster = vec![false; n];
    let mut stack = vec![seed_site];
    let mut cluster = Vec::new();
    in_cluster[seed_site] = true;
    while let Some(site) = stack.pop() {
        cluster.push(site);
        q.for_each_neighbor(site, |j, _| {
            if is_disagree[j] && !in_cluster[j] {
                in_cluster[j] = true;
                stack.push(j);
            }
        });
    }
    cluster
}
