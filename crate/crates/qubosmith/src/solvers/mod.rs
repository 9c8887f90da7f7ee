//! The classical solvers behind one uniform contract.
//!
//! Every solver takes an immutable [`QuboMatrix`] plus a [`SolverConfig`]
//! and returns a [`SolveResult`] whose `best_energy` is the exact minimum of
//! `read_energies` (best-of-reads convention). Identical `(matrix, config)`
//! including the seed reproduce identical results for `bf`, `sa`, `sd` and
//! `pticm`; `ts` is deterministic too once its wall-clock timeout is
//! disabled in favor of the stagnation stop.
//!
//! Solver ids: `bf`, `sa`, `sd`, `ts`, `pticm`, plus the decomposition
//! meta-solver `qbsolv-like:<inner>` (see [`crate::decompose`]).

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{BitVector, QuboMatrix};
use crate::rng::{Rng, PROBE_STREAM};
use crate::state::EnergyState;

mod annealing;
mod brute_force;
mod descent;
mod pt_icm;
mod tabu;

pub use annealing::simulated_annealing;
pub use brute_force::{brute_force, brute_force_with_cap, DEFAULT_ENUMERATION_CAP};
pub use descent::steepest_descent;
pub use pt_icm::pt_icm;
pub use tabu::tabu_search;

/// Cooperative cancellation flag checked at sweep/iteration boundaries.
/// A cancelled solve returns [`Error::ResourceLimit`].
#[derive(Clone, Default)]
pub struct CancelToken(Option<Arc<AtomicBool>>);

impl CancelToken {
    /// Token that never fires.
    pub fn none() -> Self {
        Self(None)
    }

    pub fn new() -> Self {
        Self(Some(Arc::new(AtomicBool::new(false))))
    }

    pub fn cancel(&self) {
        if let Some(flag) = &self.0 {
            flag.store(true, Ordering::Relaxed);
        }
    }

    #[inline]
    pub fn is_cancelled(&self) -> bool {
        self.0.as_ref().is_some_and(|f| f.load(Ordering::Relaxed))
    }

    #[inline]
    pub(crate) fn bail_if_cancelled(&self) -> Result<()> {
        if self.is_cancelled() {
            Err(Error::ResourceLimit("solve cancelled by time limit".into()))
        } else {
            Ok(())
        }
    }
}

/// Geometric temperature schedule bounds; `None` endpoints are derived from
/// a 1,000-sample flip-delta probe (see [`probe_endpoints`]).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleConfig {
    pub t_hot: Option<f64>,
    pub t_cold: Option<f64>,
}

/// Tabu-search stop and memory parameters.
///
/// `tenure` defaults to `min(20, max(4, n/10))`. `timeout_ms = Some(0)`
/// disables the wall-clock cap (useful when determinism matters more than
/// the fixed time budget). `stagnation_limit` defaults to `max(100, 2n)`
/// non-improving iterations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TabuConfig {
    pub tenure: Option<usize>,
    pub timeout_ms: Option<u64>,
    pub stagnation_limit: Option<usize>,
}

impl Default for TabuConfig {
    fn default() -> Self {
        Self {
            tenure: None,
            timeout_ms: Some(100),
            stagnation_limit: None,
        }
    }
}

/// Parallel-tempering parameters. Replicas are organized as
/// `num_replicas / 2` temperature levels with two chains per level (cluster
/// moves operate on same-temperature chain pairs), so `num_replicas` must be
/// even and at least 4. `beta_ladder`, when given, lists one inverse
/// temperature per level in ascending order; otherwise a geometric ladder is
/// derived from the probe endpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PtIcmConfig {
    pub num_replicas: usize,
    pub num_iterations: usize,
    pub beta_ladder: Option<Vec<f64>>,
}

impl Default for PtIcmConfig {
    fn default() -> Self {
        Self {
            num_replicas: 10,
            num_iterations: 10,
            beta_ladder: None,
        }
    }
}

/// Configuration shared by all solvers; each solver reads the sections it
/// understands and ignores the rest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub reads: usize,
    pub sweeps: usize,
    pub seed: u64,
    pub schedule: ScheduleConfig,
    pub tabu: TabuConfig,
    pub pticm: PtIcmConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            reads: 1000,
            sweeps: 1000,
            seed: 0,
            schedule: ScheduleConfig::default(),
            tabu: TabuConfig::default(),
            pticm: PtIcmConfig::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reads < 1 {
            return Err(Error::Config("reads must be >= 1".into()));
        }
        if self.sweeps < 1 {
            return Err(Error::Config("sweeps must be >= 1".into()));
        }
        if let (Some(hot), Some(cold)) = (self.schedule.t_hot, self.schedule.t_cold) {
            if !(hot > cold && cold > 0.0) {
                return Err(Error::Config(format!(
                    "schedule requires t_hot > t_cold > 0, got t_hot = {hot}, t_cold = {cold}"
                )));
            }
        }
        if self.schedule.t_hot.is_some() != self.schedule.t_cold.is_some() {
            return Err(Error::Config(
                "t_hot and t_cold must both be explicit or both auto".into(),
            ));
        }
        let p = &self.pticm;
        if p.num_replicas % 2 != 0 {
            return Err(Error::Config(format!(
                "num_replicas must be even for chain pairing, got {}",
                p.num_replicas
            )));
        }
        if p.num_replicas < 4 {
            return Err(Error::Config(format!(
                "num_replicas must be >= 4, got {}",
                p.num_replicas
            )));
        }
        if p.num_iterations < 1 {
            return Err(Error::Config("num_iterations must be >= 1".into()));
        }
        if let Some(ladder) = &p.beta_ladder {
            if ladder.len() != p.num_replicas / 2 {
                return Err(Error::Config(format!(
                    "beta_ladder must list one beta per temperature level ({}), got {}",
                    p.num_replicas / 2,
                    ladder.len()
                )));
            }
            if !ladder.iter().all(|&b| b.is_finite() && b > 0.0) {
                return Err(Error::Config("beta_ladder entries must be positive".into()));
            }
            if ladder.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config(
                    "beta_ladder must be strictly ascending".into(),
                ));
            }
        }
        Ok(())
    }

    pub(crate) fn resolved_tabu(&self, n: usize) -> ResolvedTabu {
        ResolvedTabu {
            tenure: self.tabu.tenure.unwrap_or_else(|| 20.min(4.max(n / 10))),
            timeout: match self.tabu.timeout_ms {
                Some(0) | None => None,
                Some(ms) => Some(Duration::from_millis(ms)),
            },
            stagnation: self.tabu.stagnation_limit.unwrap_or_else(|| 100.max(2 * n)),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct ResolvedTabu {
    pub tenure: usize,
    pub timeout: Option<Duration>,
    pub stagnation: usize,
}

/// Result of one solver invocation under the best-of-reads convention.
#[derive(Clone, Debug, Serialize)]
pub struct SolveResult {
    pub solver_id: String,
    pub best_energy: f64,
    pub best_bits: BitVector,
    pub read_energies: Vec<f64>,
    pub solve_time: Duration,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

/// The five direct solvers. Serializes as the short id strings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverKind {
    #[serde(rename = "bf")]
    BruteForce,
    #[serde(rename = "sa")]
    SimulatedAnnealing,
    #[serde(rename = "sd")]
    SteepestDescent,
    #[serde(rename = "ts")]
    TabuSearch,
    #[serde(rename = "pticm")]
    PtIcm,
}

impl SolverKind {
    pub fn id(self) -> &'static str {
        match self {
            SolverKind::BruteForce => "bf",
            SolverKind::SimulatedAnnealing => "sa",
            SolverKind::SteepestDescent => "sd",
            SolverKind::TabuSearch => "ts",
            SolverKind::PtIcm => "pticm",
        }
    }

    pub fn parse(id: &str) -> Result<Self> {
        match id {
            "bf" => Ok(SolverKind::BruteForce),
            "sa" => Ok(SolverKind::SimulatedAnnealing),
            "sd" => Ok(SolverKind::SteepestDescent),
            "ts" => Ok(SolverKind::TabuSearch),
            "pticm" => Ok(SolverKind::PtIcm),
            other => Err(Error::UnknownSolver(other.to_string())),
        }
    }

    pub fn all() -> [SolverKind; 5] {
        [
            SolverKind::BruteForce,
            SolverKind::SimulatedAnnealing,
            SolverKind::SteepestDescent,
            SolverKind::TabuSearch,
            SolverKind::PtIcm,
        ]
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Dispatches a direct solver by kind.
pub fn solve(q: &QuboMatrix, kind: SolverKind, cfg: &SolverConfig) -> Result<SolveResult> {
    solve_with_cancel(q, kind, cfg, &CancelToken::none())
}

pub fn solve_with_cancel(
    q: &QuboMatrix,
    kind: SolverKind,
    cfg: &SolverConfig,
    cancel: &CancelToken,
) -> Result<SolveResult> {
    match kind {
        SolverKind::BruteForce => brute_force::brute_force_cancellable(q, cancel),
        SolverKind::SimulatedAnnealing => {
            annealing::simulated_annealing_cancellable(q, cfg, cancel)
        }
        SolverKind::SteepestDescent => descent::steepest_descent_cancellable(q, cfg, cancel),
        SolverKind::TabuSearch => tabu::tabu_search_cancellable(q, cfg, cancel),
        SolverKind::PtIcm => pt_icm::pt_icm_cancellable(q, cfg, cancel),
    }
}

// ---- shared read machinery ----

pub(crate) struct ReadOutcome {
    pub energy: f64,
    pub bits: BitVector,
    /// Per-read counters folded into result metadata (solver-specific keys).
    pub counters: Vec<(&'static str, u64)>,
}

/// Runs `reads` independent reads in parallel and returns the outcomes plus
/// the index of the winner under the deterministic lowest-read-index
/// tie-break. Each read derives its PRNG stream from its index, so the
/// result is identical to sequential execution.
pub(crate) fn run_reads<F>(reads: usize, per_read: F) -> Result<(Vec<ReadOutcome>, usize)>
where
    F: Fn(usize) -> Result<ReadOutcome> + Sync + Send,
{
    let outcomes: Vec<ReadOutcome> = (0..reads)
        .into_par_iter()
        .map(per_read)
        .collect::<Result<_>>()?;
    let mut best = 0usize;
    for (r, o) in outcomes.iter().enumerate() {
        if o.energy < outcomes[best].energy {
            best = r;
        }
    }
    Ok((outcomes, best))
}

/// Folds read outcomes into a [`SolveResult`].
pub(crate) fn reduce_reads(
    solver_id: &str,
    outcomes: Vec<ReadOutcome>,
    best: usize,
    solve_time: Duration,
    extra_metadata: impl IntoIterator<Item = (String, serde_json::Value)>,
) -> SolveResult {
    let mut counters: BTreeMap<&'static str, u64> = BTreeMap::new();
    for o in &outcomes {
        for &(key, value) in &o.counters {
            *counters.entry(key).or_default() += value;
        }
    }
    let mut metadata: BTreeMap<String, serde_json::Value> = counters
        .into_iter()
        .map(|(k, v)| (k.to_string(), serde_json::json!(v)))
        .collect();
    metadata.extend(extra_metadata);
    metadata.insert("reads".into(), serde_json::json!(outcomes.len()));
    let read_energies: Vec<f64> = outcomes.iter().map(|o| o.energy).collect();
    SolveResult {
        solver_id: solver_id.to_string(),
        best_energy: read_energies[best],
        best_bits: outcomes[best].bits.clone(),
        read_energies,
        solve_time,
        metadata,
    }
}

/// Temperature endpoints from a 1,000-sample probe: starting from a random
/// assignment on the probe stream, sample `|flip_delta|` along a random flip
/// walk. `t_hot = median / ln 2` makes the initial acceptance of the median
/// move about 50%; `t_cold = min nonzero / ln 100` makes the smallest real
/// move 1% acceptable at the end. Degenerate landscapes (all deltas zero)
/// fall back to `(1, 0.01)`.
pub(crate) fn probe_endpoints(q: &QuboMatrix, seed: u64) -> (f64, f64) {
    let n = q.num_vars();
    let mut rng = Rng::from_stream(seed, PROBE_STREAM);
    let bits = BitVector::random(n, &mut rng);
    let mut state = EnergyState::new(q, bits).expect("probe state");
    let mut samples = Vec::with_capacity(1000);
    for _ in 0..1000 {
        let i = rng.index(n);
        samples.push(state.flip_delta(i).abs());
        state.apply_flip(q, i);
    }
    samples.sort_by(f64::total_cmp);
    let median = samples[samples.len() / 2];
    let t_hot = if median > 0.0 {
        median / std::f64::consts::LN_2
    } else {
        1.0
    };
    let min_nonzero = samples.iter().copied().find(|&d| d > 0.0);
    let ln_100 = 100f64.ln();
    let mut t_cold = match min_nonzero {
        Some(d) => d / ln_100,
        None => t_hot / 100.0,
    };
    if t_cold >= t_hot {
        t_cold = t_hot * (std::f64::consts::LN_2 / ln_100);
    }
    (t_hot, t_cold)
}

/// Geometric interpolation `T_k = t_hot * (t_cold / t_hot)^(k / (sweeps-1))`.
/// A single sweep stays at `t_hot`.
pub(crate) fn geometric_schedule(t_hot: f64, t_cold: f64, sweeps: usize) -> Vec<f64> {
    if sweeps == 1 {
        return vec![t_hot];
    }
    let ratio = t_cold / t_hot;
    (0..sweeps)
        .map(|k| t_hot * ratio.powf(k as f64 / (sweeps - 1) as f64))
        .collect()
}

/// Resolves explicit-or-auto schedule endpoints.
pub(crate) fn schedule_endpoints(q: &QuboMatrix, cfg: &SolverConfig) -> (f64, f64) {
    match (cfg.schedule.t_hot, cfg.schedule.t_cold) {
        (Some(hot), Some(cold)) => (hot, cold),
        _ => probe_endpoints(q, cfg.seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::matrix_from_triples;

    #[test]
    fn config_validation() {
        let mut cfg = SolverConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.reads = 0;
        assert!(cfg.validate().is_err());
        cfg = SolverConfig::default();
        cfg.schedule.t_hot = Some(1.0);
        cfg.schedule.t_cold = Some(2.0);
        assert!(cfg.validate().is_err());
        cfg.schedule.t_cold = Some(0.5);
        assert!(cfg.validate().is_ok());
        cfg = SolverConfig::default();
        cfg.pticm.num_replicas = 7;
        assert!(cfg.validate().is_err());
        cfg.pticm.num_replicas = 2;
        assert!(cfg.validate().is_err());
        cfg.pticm.num_replicas = 8;
        cfg.pticm.beta_ladder = Some(vec![0.1, 0.2, 0.3]);
        assert!(cfg.validate().is_err()); // needs 4 levels
        cfg.pticm.beta_ladder = Some(vec![0.1, 0.2, 0.3, 0.4]);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn solver_id_round_trip() {
        for kind in SolverKind::all() {
            assert_eq!(SolverKind::parse(kind.id()).unwrap(), kind);
        }
        assert!(matches!(
            SolverKind::parse("annealer"),
            Err(Error::UnknownSolver(_))
        ));
    }

    #[test]
    fn schedule_shape() {
        let temps = geometric_schedule(10.0, 0.1, 5);
        assert_eq!(temps.len(), 5);
        assert_eq!(temps[0], 10.0);
        assert!((temps[4] - 0.1).abs() < 1e-12);
        for w in temps.windows(2) {
            assert!(w[1] < w[0]);
        }
        // constant ratio between consecutive sweeps
        let r0 = temps[1] / temps[0];
        for w in temps.windows(2) {
            assert!((w[1] / w[0] - r0).abs() < 1e-12);
        }
        assert_eq!(geometric_schedule(10.0, 0.1, 1), vec![10.0]);
    }

    #[test]
    fn probe_endpoints_ordering() {
        let q = crate::generate::random_qubo(&crate::generate::GeneratorSpec {
            n: 32,
            sigma: 0.1,
            seed: 5,
        })
        .unwrap();
        let (hot, cold) = probe_endpoints(&q, 7);
        assert!(hot > cold && cold > 0.0);
        // zero matrix falls back to (1, 0.01)
        let zero = matrix_from_triples(4, [(0, 0, 0.0)]).unwrap();
        let (hot, cold) = probe_endpoints(&zero, 7);
        assert_eq!((hot, cold), (1.0, 0.01));
    }

    #[test]
    fn tabu_resolution_defaults() {
        let cfg = SolverConfig::default();
        let r = cfg.resolved_tabu(16);
        assert_eq!(r.tenure, 4);
        assert_eq!(r.timeout, Some(Duration::from_millis(100)));
        assert_eq!(r.stagnation, 100);
        let r = cfg.resolved_tabu(10_000);
        assert_eq!(r.tenure, 20);
        assert_eq!(r.stagnation, 20_000);
        let mut cfg = SolverConfig::default();
        cfg.tabu.timeout_ms = Some(0);
        assert_eq!(cfg.resolved_tabu(16).timeout, None);
    }
}
