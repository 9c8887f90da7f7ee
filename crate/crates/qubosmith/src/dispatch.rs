//! Solver selection by string id and unified invocation.
//!
//! Direct solvers are addressed as `bf`, `sa`, `sd`, `ts`, `pticm`; the
//! decomposition meta-solver as `qbsolv-like:<inner>` where `<inner>` is a
//! direct solver id.

use serde::{Deserialize, Serialize};

use crate::decompose::{solve_decomposed_cancellable, DecompositionConfig};
use crate::error::{Error, Result};
use crate::matrix::QuboMatrix;
use crate::solvers::{solve_with_cancel, CancelToken, SolveResult, SolverConfig, SolverKind};

/// A fully configured solver ready to run against a matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SolverInstance {
    Decomposed(DecompositionConfig),
    Basic {
        kind: SolverKind,
        config: SolverConfig,
    },
}

impl SolverInstance {
    /// Instance with default configuration for an id string.
    pub fn from_id(id: &str) -> Result<Self> {
        match id.strip_prefix("qbsolv-like:") {
            Some(inner) => Ok(SolverInstance::Decomposed(DecompositionConfig {
                inner: SolverKind::parse(inner)
                    .map_err(|_| Error::UnknownSolver(id.to_string()))?,
                ..DecompositionConfig::default()
            })),
            None => Ok(SolverInstance::Basic {
                kind: SolverKind::parse(id)?,
                config: SolverConfig::default(),
            }),
        }
    }

    /// Instance from an id plus a JSON configuration object. For direct
    /// solvers the JSON is a [`SolverConfig`]; for `qbsolv-like:<inner>` it
    /// is a [`DecompositionConfig`] whose `inner` field is overridden by the
    /// id suffix. Unknown keys are rejected.
    pub fn from_id_and_json(id: &str, config_json: Option<&str>) -> Result<Self> {
        let mut instance = Self::from_id(id)?;
        if let Some(json) = config_json {
            let config_err = |e: serde_json::Error| Error::Config(format!("solver config: {e}"));
            match &mut instance {
                SolverInstance::Basic { config, .. } => {
                    *config = serde_json::from_str(json).map_err(config_err)?;
                }
                SolverInstance::Decomposed(cfg) => {
                    let inner = cfg.inner;
                    *cfg = serde_json::from_str(json).map_err(config_err)?;
                    cfg.inner = inner;
                }
            }
        }
        instance.validate_static()?;
        Ok(instance)
    }

    /// Validation that does not need the matrix dimension.
    pub fn validate_static(&self) -> Result<()> {
        match self {
            SolverInstance::Basic { config, .. } => config.validate(),
            SolverInstance::Decomposed(cfg) => cfg.inner_config.validate(),
        }
    }

    pub fn id(&self) -> String {
        match self {
            SolverInstance::Basic { kind, .. } => kind.id().to_string(),
            SolverInstance::Decomposed(cfg) => cfg.solver_id(),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            SolverInstance::Basic { config, .. } => config.seed,
            SolverInstance::Decomposed(cfg) => cfg.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            SolverInstance::Basic { config, .. } => config.seed = seed,
            SolverInstance::Decomposed(cfg) => cfg.seed = seed,
        }
    }

    pub fn solve(&self, q: &QuboMatrix) -> Result<SolveResult> {
        self.solve_with_cancel(q, &CancelToken::none())
    }

    pub fn solve_with_cancel(&self, q: &QuboMatrix, cancel: &CancelToken) -> Result<SolveResult> {
        match self {
            SolverInstance::Basic { kind, config } => solve_with_cancel(q, *kind, config, cancel),
            SolverInstance::Decomposed(cfg) => solve_decomposed_cancellable(q, cfg, cancel),
        }
    }

    /// Worst-case resident bytes of one solve beyond the matrix itself:
    /// per-worker assignment state (bits + fields + snapshots).
    pub fn state_bytes_estimate(&self, q: &QuboMatrix) -> u64 {
        let per_state = (q.num_vars() * 9 + 64) as u64;
        let workers = match self {
            SolverInstance::Basic { kind, config } => match kind {
                SolverKind::BruteForce => 2,
                SolverKind::PtIcm => config.pticm.num_replicas * 4,
                _ => rayon::current_num_threads() * 3,
            },
            SolverInstance::Decomposed(_) => rayon::current_num_threads() * 3,
        };
        per_state * workers as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_direct_and_decomposed_ids() {
        assert_eq!(SolverInstance::from_id("sa").unwrap().id(), "sa");
        assert_eq!(
            SolverInstance::from_id("qbsolv-like:ts").unwrap().id(),
            "qbsolv-like:ts"
        );
        assert!(SolverInstance::from_id("qbsolv-like:bogus").is_err());
        assert!(SolverInstance::from_id("bogus").is_err());
        assert!(SolverInstance::from_id("qbsolv-like:qbsolv-like:sa").is_err());
    }

    #[test]
    fn json_config_round_trip() {
        let inst =
            SolverInstance::from_id_and_json("sa", Some(r#"{"reads": 5, "sweeps": 10, "seed": 3}"#))
                .unwrap();
        match inst {
            SolverInstance::Basic { config, .. } => {
                assert_eq!(config.reads, 5);
                assert_eq!(config.sweeps, 10);
                assert_eq!(config.seed, 3);
            }
            _ => panic!("expected basic"),
        }
        // unknown keys rejected
        assert!(SolverInstance::from_id_and_json("sa", Some(r#"{"reeds": 5}"#)).is_err());
        // decomposed config, inner pinned by the id suffix
        let inst = SolverInstance::from_id_and_json(
            "qbsolv-like:sd",
            Some(r#"{"sub_size": 10, "stall_limit": 2}"#),
        )
        .unwrap();
        match inst {
            SolverInstance::Decomposed(cfg) => {
                assert_eq!(cfg.sub_size, 10);
                assert_eq!(cfg.inner, SolverKind::SteepestDescent);
            }
            _ => panic!("expected decomposed"),
        }
    }

    #[test]
    fn seed_override() {
        let mut inst = SolverInstance::from_id("sd").unwrap();
        inst.set_seed(42);
        assert_eq!(inst.seed(), 42);
    }
}
