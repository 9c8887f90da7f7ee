//! Declarative benchmark runs over a (sizes x sigmas x instances x solvers)
//! matrix, with resume.
//!
//! A run lives in `<output_dir>/<run_id>/`: generated instances under
//! `instances/`, measurements in `records.csv`, aggregates in
//! `aggregate.json`, `summary.md` and `plots/`. Rerunning the same config
//! skips every (instance, solver) cell already present in `records.csv` and
//! never changes recorded energies, times or statuses; a fully recorded run
//! performs zero new solves and re-emits byte-identical reports.
//!
//! Seeds: instance `t` of cell `(size index si, sigma index gi)` uses
//! `stream_seed(seed, linear)` with `linear = (si * |sigmas| + gi) *
//! instances_per_cell + t`; solver `k` on that instance uses
//! `stream_seed(instance_seed, 1_000_000 + k)` unless the solver entry
//! pins a fixed `seed`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::dispatch::SolverInstance;
use crate::error::{Error, Result};
use crate::generate::{random_qubo, GeneratorSpec};
use crate::harness::report;
use crate::harness::{timed_solve, InstanceMeta, RunRecord, TimedSolveOptions};
use crate::io::{read_instance_file, write_instance_file};
use crate::matrix::QuboMatrix;
use crate::rng::stream_seed;

fn default_instances_per_cell() -> usize {
    1
}
fn default_repetitions() -> usize {
    3
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("runs")
}
/// Two hours, the conventional per-problem budget for exact solvers.
fn default_time_limit_s() -> u64 {
    7200
}
fn default_memory_cap() -> u64 {
    crate::harness::DEFAULT_MEMORY_CAP_BYTES
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverEntry {
    /// `bf`, `sa`, `sd`, `ts`, `pticm` or `qbsolv-like:<inner>`.
    pub id: String,
    /// Fixed solver seed for every cell; derived per instance when absent.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Overrides validated against the solver's config schema.
    #[serde(default)]
    pub config: Option<toml::Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunMatrixConfig {
    pub run_id: String,
    pub sizes: Vec<usize>,
    pub sigmas: Vec<f64>,
    #[serde(default = "default_instances_per_cell")]
    pub instances_per_cell: usize,
    pub solvers: Vec<SolverEntry>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// 0 disables the per-solve wall-clock limit.
    #[serde(default = "default_time_limit_s")]
    pub time_limit_per_solve_s: u64,
    #[serde(default = "default_memory_cap")]
    pub memory_cap_bytes: u64,
}

impl RunMatrixConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunMatrixConfig = toml::from_str(text)
            .map_err(|e| Error::Config(format!("run config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.run_id.is_empty()
            || self
                .run_id
                .chars()
                .any(|c| !(c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.'))
        {
            return Err(Error::Config(format!(
                "run_id '{}' must be a nonempty [A-Za-z0-9._-]+ name",
                self.run_id
            )));
        }
        if self.sizes.is_empty() {
            return Err(Error::Config("sizes must not be empty".into()));
        }
        if self.sigmas.is_empty() {
            return Err(Error::Config("sigmas must not be empty".into()));
        }
        if self.solvers.is_empty() {
            return Err(Error::Config("solvers must not be empty".into()));
        }
        if self.instances_per_cell < 1 {
            return Err(Error::Config("instances_per_cell must be >= 1".into()));
        }
        if self.repetitions < 1 {
            return Err(Error::Config("repetitions must be >= 1".into()));
        }
        let mut ids: Vec<&str> = self.solvers.iter().map(|s| s.id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.solvers.len() {
            return Err(Error::Config(
                "solver ids must be unique within one run".into(),
            ));
        }
        // every entry must build a valid instance before any solve starts
        for entry in &self.solvers {
            entry.build_instance()?;
        }
        Ok(())
    }
}

impl SolverEntry {
    fn build_instance(&self) -> Result<SolverInstance> {
        let json = match &self.config {
            Some(value) => Some(serde_json::to_string(value)?),
            None => None,
        };
        SolverInstance::from_id_and_json(&self.id, json.as_deref())
    }
}

#[derive(Debug)]
pub struct BenchOutcome {
    pub run_dir: PathBuf,
    /// Cells actually solved in this invocation (0 on a no-op resume).
    pub new_solves: usize,
    pub records: Vec<RunRecord>,
}

/// Executes (or resumes) a benchmark run.
pub fn run_bench(cfg: &RunMatrixConfig) -> Result<BenchOutcome> {
    cfg.validate()?;
    let run_dir = cfg.output_dir.join(&cfg.run_id);
    let instances_dir = run_dir.join("instances");
    std::fs::create_dir_all(&instances_dir)?;

    let records_path = run_dir.join("records.csv");
    let mut recorded: BTreeMap<(String, String), RunRecord> = BTreeMap::new();
    if records_path.exists() {
        for r in report::read_records_csv(&records_path)? {
            recorded.insert((r.instance_id.clone(), r.solver_id.clone()), r);
        }
    }

    let solvers: Vec<SolverInstance> = cfg
        .solvers
        .iter()
        .map(|e| e.build_instance())
        .collect::<Result<_>>()?;
    let opts = TimedSolveOptions {
        repetitions: cfg.repetitions,
        memory_cap_bytes: cfg.memory_cap_bytes,
        time_limit: match cfg.time_limit_per_solve_s {
            0 => None,
            s => Some(Duration::from_secs(s)),
        },
    };

    let mut records: Vec<RunRecord> = Vec::new();
    let mut new_solves = 0usize;
    for (si, &n) in cfg.sizes.iter().enumerate() {
        for (gi, &sigma) in cfg.sigmas.iter().enumerate() {
            for t in 0..cfg.instances_per_cell {
                let linear = ((si * cfg.sigmas.len()) + gi) * cfg.instances_per_cell + t;
                let spec = GeneratorSpec {
                    n,
                    sigma,
                    seed: stream_seed(cfg.seed, linear as u64),
                };
                let instance_id = spec.instance_id();
                let instance_path = instances_dir.join(format!("{instance_id}.qubo"));

                // load the matrix lazily: a fully recorded instance only
                // needs its file to exist
                let mut matrix: Option<QuboMatrix> = None;
                if !instance_path.exists() {
                    let q = random_qubo(&spec)?;
                    write_instance_file(&q, &instance_path)?;
                    matrix = Some(q);
                }

                for (k, solver) in solvers.iter().enumerate() {
                    let key = (instance_id.clone(), solver.id());
                    if let Some(existing) = recorded.get(&key) {
                        records.push(existing.clone());
                        continue;
                    }
                    if matrix.is_none() {
                        matrix = Some(read_instance_file(&instance_path)?);
                    }
                    let q = matrix.as_ref().unwrap();
                    let meta = InstanceMeta {
                        instance_id: instance_id.clone(),
                        n,
                        sigma: Some(sigma),
                        density: q.density().unwrap_or(1.0),
                    };
                    let mut solver = solver.clone();
                    solver.set_seed(
                        cfg.solvers[k]
                            .seed
                            .unwrap_or_else(|| stream_seed(spec.seed, 1_000_000 + k as u64)),
                    );
                    // one timed solve at a time: timing integrity over
                    // throughput
                    let record = timed_solve(q, &solver, &meta, &opts);
                    new_solves += 1;
                    recorded.insert(key, record.clone());
                    records.push(record);
                    // checkpoint after every cell so interrupted runs resume
                    report::write_records_csv(&records_path, &records)?;
                }
            }
        }
    }

    report::emit_all(&run_dir, &records)?;
    Ok(BenchOutcome {
        run_dir,
        new_solves,
        records,
    })
}
