//! Simulated annealing with a geometric temperature schedule.
//!
//! Per read: random initial bits, then `sweeps` Metropolis sweeps, sweep `k`
//! at temperature `T_k = t_hot * (t_cold / t_hot)^(k / (sweeps - 1))`. One
//! sweep proposes a flip of every variable in index order and accepts with
//! probability `min(1, exp(-delta / T_k))`; a uniform variate is consumed
//! only when `delta > 0`. Each read reports the lowest energy observed at
//! sweep boundaries; the result is best-of-reads.

use std::time::Instant;

use crate::error::Result;
use crate::matrix::{BitVector, QuboMatrix};
use crate::rng::Rng;
use crate::solvers::{
    geometric_schedule, reduce_reads, run_reads, schedule_endpoints, CancelToken, ReadOutcome,
    SolveResult, SolverConfig,
};
use crate::state::EnergyState;

pub fn simulated_annealing(q: &QuboMatrix, cfg: &SolverConfig) -> Result<SolveResult> {
    simulated_annealing_cancellable(q, cfg, &CancelToken::none())
}

pub(crate) fn simulated_annealing_cancellable(
    q: &QuboMatrix,
    cfg: &SolverConfig,
    cancel: &CancelToken,
) -> Result<SolveResult> {
    cfg.validate()?;
    let start = Instant::now();
    let (t_hot, t_cold) = schedule_endpoints(q, cfg);
    let temps = geometric_schedule(t_hot, t_cold, cfg.sweeps);
    let n = q.num_vars();

    let (outcomes, best) = run_reads(cfg.reads, |read| {
        let mut rng = Rng::from_stream(cfg.seed, read as u64);
        let mut state = EnergyState::new(q, BitVector::random(n, &mut rng))?;
        let mut best_energy = state.energy();
        let mut best_bits = state.bits().clone();
        let mut accepted = 0u64;
        for &t in &temps {
            cancel.bail_if_cancelled()?;
            let inv_t = 1.0 / t;
            for i in 0..n {
                let delta = state.flip_delta(i);
                if delta <= 0.0 || rng.uniform() < (-delta * inv_t).exp() {
                    state.apply_flip(q, i);
                    accepted += 1;
                }
            }
            if state.energy() < best_energy {
                best_energy = state.energy();
                best_bits = state.bits().clone();
            }
        }
        Ok(ReadOutcome {
            energy: best_energy,
            bits: best_bits,
            counters: vec![
                ("accepted_moves", accepted),
                ("proposed_moves", (n * cfg.sweeps) as u64),
            ],
        })
    })?;

    Ok(reduce_reads(
        "sa",
        outcomes,
        best,
        start.elapsed(),
        [
            ("t_hot".to_string(), serde_json::json!(t_hot)),
            ("t_cold".to_string(), serde_json::json!(t_cold)),
            ("sweeps".to_string(), serde_json::json!(cfg.sweeps)),
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::matrix_from_triples;
    use crate::solvers::brute_force;

    fn small_cfg(seed: u64) -> SolverConfig {
        SolverConfig {
            reads: 20,
            sweeps: 50,
            seed,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn zero_matrix_returns_zero_energy() {
        let q = matrix_from_triples(8, [(0, 0, 0.0)]).unwrap();
        let r = simulated_annealing(&q, &small_cfg(3)).unwrap();
        assert_eq!(r.best_energy, 0.0);
        assert_eq!(q.energy(&r.best_bits).unwrap(), 0.0);
    }

    #[test]
    fn best_of_reads_invariants() {
        let q = crate::generate::random_qubo(&crate::generate::GeneratorSpec {
            n: 24,
            sigma: 0.5,
            seed: 6,
        })
        .unwrap();
        let r = simulated_annealing(&q, &small_cfg(9)).unwrap();
        assert_eq!(r.read_energies.len(), 20);
        let min = r.read_energies.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(r.best_energy, min);
        assert!((q.energy(&r.best_bits).unwrap() - r.best_energy).abs() < 1e-8);
    }

    #[test]
    fn deterministic_given_seed() {
        let q = crate::generate::random_qubo(&crate::generate::GeneratorSpec {
            n: 20,
            sigma: 0.1,
            seed: 2,
        })
        .unwrap();
        let a = simulated_annealing(&q, &small_cfg(5)).unwrap();
        let b = simulated_annealing(&q, &small_cfg(5)).unwrap();
        assert_eq!(a.best_energy.to_bits(), b.best_energy.to_bits());
        assert_eq!(a.best_bits, b.best_bits);
        assert_eq!(a.read_energies, b.read_energies);
    }

    /// A flat schedule at very high temperature degenerates to Metropolis
    /// sampling that accepts nearly everything.
    #[test]
    fn high_temperature_accepts_almost_all() {
        let q = crate::generate::random_qubo(&crate::generate::GeneratorSpec {
            n: 32,
            sigma: 1.0, // |Q| well below 2 for most entries
            seed: 8,
        })
        .unwrap();
        let mut cfg = small_cfg(4);
        cfg.schedule.t_hot = Some(1e6);
        cfg.schedule.t_cold = Some(1e6 * (1.0 - 1e-12));
        let r = simulated_annealing(&q, &cfg).unwrap();
        // counters are already summed over reads
        let accepted = r.metadata["accepted_moves"].as_u64().unwrap();
        let proposed = r.metadata["proposed_moves"].as_u64().unwrap();
        assert!(
            accepted as f64 >= 0.99 * proposed as f64,
            "accepted {accepted} of {proposed}"
        );
    }

    #[test]
    fn finds_small_optimum() {
        let q = matrix_from_triples(2, [(0, 0, 1.0), (0, 1, -3.0), (1, 1, 1.0)]).unwrap();
        let r = simulated_annealing(&q, &small_cfg(1)).unwrap();
        assert_eq!(r.best_energy, -1.0);
    }

    /// More sweeps must not hurt on average (statistical, fixed seeds).
    #[test]
    fn monotone_sweep_budget() {
        let mut mean_short = 0.0;
        let mut mean_long = 0.0;
        let instances = 50;
        for t in 0..instances {
            let q = crate::generate::random_qubo(&crate::generate::GeneratorSpec {
                n: 64,
                sigma: 1.0,
                seed: 1000 + t,
            })
            .unwrap();
            let mut cfg = SolverConfig {
                reads: 4,
                sweeps: 10,
                seed: t,
                ..SolverConfig::default()
            };
            mean_short += simulated_annealing(&q, &cfg).unwrap().best_energy;
            cfg.sweeps = 1000;
            mean_long += simulated_annealing(&q, &cfg).unwrap().best_energy;
        }
        mean_short /= instances as f64;
        mean_long /= instances as f64;
        assert!(
            mean_long <= mean_short,
            "1000 sweeps {mean_long} vs 10 sweeps {mean_short}"
        );
    }

    #[test]
    fn matches_brute_force_on_tiny_instances() {
        let mut hits = 0;
        for t in 0..10 {
            let q = crate::generate::random_qubo(&crate::generate::GeneratorSpec {
                n: 12,
                sigma: 0.1,
                seed: 500 + t,
            })
            .unwrap();
            let exact = brute_force(&q).unwrap().best_energy;
            let cfg = SolverConfig {
                reads: 50,
                sweeps: 100,
                seed: t,
                ..SolverConfig::default()
            };
            let sa = simulated_annealing(&q, &cfg).unwrap().best_energy;
            assert!(sa >= exact - 1e-9);
            if (sa - exact).abs() < 1e-8 {
                hits += 1;
            }
        }
        assert!(hits >= 9, "SA matched brute force on {hits}/10");
    }
}
