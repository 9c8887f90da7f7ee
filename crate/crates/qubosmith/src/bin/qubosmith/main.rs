//! Command-line entry point: instance generation, solving, benchmark runs,
//! model export and report generation.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qubosmith::dispatch::SolverInstance;
use qubosmith::error::Error;
use qubosmith::generate::{random_qubo, GeneratorSpec};
use qubosmith::gset::{density_percent_4dp, maxcut_to_qubo, parse_gset};
use qubosmith::harness::{report, run_bench, RunMatrixConfig};
use qubosmith::io::{read_instance_file, write_instance_file};
use qubosmith::matrix::QuboMatrix;
use qubosmith::solvers::SolverConfig;

mod export;
mod solution;

#[derive(Parser)]
#[command(
    name = "qubosmith",
    version,
    about = "QUBO solvers and benchmarking harness",
    after_help = "Set QUBOSMITH_THREADS to cap worker parallelism."
)]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dense Gaussian random instance file.
    Generate(GenerateArgs),
    /// Solve an instance file and print the result as JSON.
    Solve(SolveArgs),
    /// Execute (or resume) a declarative benchmark run.
    Bench(BenchArgs),
    /// Export an instance to an external model format, or score an
    /// externally produced solution.
    Export(ExportArgs),
    /// Convert a G-set Max-Cut graph file into a QUBO instance.
    GsetToQubo(GsetArgs),
    /// Re-aggregate a records CSV into reports.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Problem size (number of binary variables).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=50_000))]
    n: u64,
    /// Standard deviation of the coefficient distribution.
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output instance path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (native format).
    #[arg(long = "in")]
    input: PathBuf,
    /// Solver id: bf, sa, sd, ts, pticm or qbsolv-like:<inner>.
    #[arg(long)]
    solver: String,
    #[arg(long)]
    reads: Option<usize>,
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    t_hot: Option<f64>,
    #[arg(long)]
    t_cold: Option<f64>,
    #[arg(long)]
    tenure: Option<usize>,
    /// Tabu wall-clock cap in milliseconds; 0 disables it.
    #[arg(long)]
    timeout_ms: Option<u64>,
    #[arg(long)]
    stagnation_limit: Option<usize>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Decomposition subproblem size (qbsolv-like solvers).
    #[arg(long)]
    sub_size: Option<usize>,
    /// Inner-solver reads inside decomposition.
    #[arg(long)]
    inner_reads: Option<usize>,
    #[arg(long)]
    stall_limit: Option<usize>,
    #[arg(long, value_enum)]
    selection: Option<SelectionArg>,
    /// Solve decomposition subsets of a round in parallel.
    #[arg(long)]
    parallel_decomp: bool,
    /// Full solver configuration as JSON (replaces the flags above).
    #[arg(long)]
    config_json: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectionArg {
    Impact,
    Random,
}

#[derive(Args)]
struct BenchArgs {
    /// Run-matrix configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the configured output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Target format for model export.
    #[arg(long, value_enum)]
    format: Option<ExportFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Score a solution file produced by an external solver.
    #[arg(long)]
    import_solution: Option<PathBuf>,
    /// Known best energy; adds relative accuracy to the score output.
    #[arg(long)]
    best_energy: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Native,
    LpText,
}

#[derive(Args)]
struct GsetArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// records.csv produced by a bench run.
    #[arg(long)]
    records: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
}

/// Usage/config errors exit 2; everything else that fails exits 1.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::UnknownSolver(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = CliArgs::parse();
    if let Ok(threads) = std::env::var("QUBOSMITH_THREADS") {
        match threads.parse::<usize>() {
            Ok(k) if k >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global();
            }
            _ => {
                eprintln!("qubosmith: invalid QUBOSMITH_THREADS '{threads}'");
                return ExitCode::from(2);
            }
        }
    }
    let outcome = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Export(args) => cmd_export(args),
        Command::GsetToQubo(args) => cmd_gset_to_qubo(args),
        Command::Report(args) => cmd_report(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("qubosmith: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Error> {
    let spec = GeneratorSpec {
        n: args.n as usize,
        sigma: args.sigma,
        seed: args.seed,
    };
    let q = random_qubo(&spec)?;
    write_instance_file(&q, &args.out)?;
    println!("instance {}", spec.instance_id());
    println!(
        "n {} entries {} density {}",
        q.num_vars(),
        q.entry_count(),
        density_display(&q)
    );
    Ok(())
}

fn density_display(q: &QuboMatrix) -> String {
    match density_percent_4dp(q.num_vars(), q.interaction_count()) {
        Ok(pct) => format!("{pct}%"),
        Err(_) => "n/a".to_string(),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<(), Error> {
    let solver = build_solver(&args)?;
    let q = read_instance_file(&args.input)?;
    let result = solver.solve(&q)?;
    let output = serde_json::json!({
        "solver_id": result.solver_id,
        "n": q.num_vars(),
        "energy": result.best_energy,
        "bits": result.best_bits,
        "solve_time_s": result.solve_time.as_secs_f64(),
        "metadata": result.metadata,
    });
    println!("{}", serde_json::to_string_pretty(&output)?);
    Ok(())
}

fn build_solver(args: &SolveArgs) -> Result<SolverInstance, Error> {
    let mut instance =
        SolverInstance::from_id_and_json(&args.solver, args.config_json.as_deref())?;
    if args.config_json.is_some() {
        return Ok(instance);
    }
    let apply = |cfg: &mut SolverConfig, args: &SolveArgs| {
        if let Some(v) = args.reads {
            cfg.reads = v;
        }
        if let Some(v) = args.sweeps {
            cfg.sweeps = v;
        }
        if args.t_hot.is_some() {
            cfg.schedule.t_hot = args.t_hot;
        }
        if args.t_cold.is_some() {
            cfg.schedule.t_cold = args.t_cold;
        }
        if args.tenure.is_some() {
            cfg.tabu.tenure = args.tenure;
        }
        if args.timeout_ms.is_some() {
            cfg.tabu.timeout_ms = args.timeout_ms;
        }
        if args.stagnation_limit.is_some() {
            cfg.tabu.stagnation_limit = args.stagnation_limit;
        }
        if let Some(v) = args.replicas {
            cfg.pticm.num_replicas = v;
        }
        if let Some(v) = args.iterations {
            cfg.pticm.num_iterations = v;
        }
    };
    match &mut instance {
        SolverInstance::Basic { config, .. } => {
            apply(config, args);
            config.seed = args.seed;
            config.validate()?;
        }
        SolverInstance::Decomposed(cfg) => {
            if let Some(v) = args.sub_size {
                cfg.sub_size = v;
            }
            if let Some(v) = args.inner_reads {
                cfg.inner_config.reads = v;
            }
            if let Some(v) = args.stall_limit {
                cfg.stall_limit = v;
            }
            if let Some(sel) = args.selection {
                cfg.selection = match sel {
                    SelectionArg::Impact => qubosmith::decompose::Selection::Impact,
                    SelectionArg::Random => qubosmith::decompose::Selection::Random,
                };
            }
            cfg.parallel = args.parallel_decomp;
            apply(&mut cfg.inner_config, args);
            cfg.seed = args.seed;
            cfg.inner_config.validate()?;
        }
    }
    Ok(instance)
}

fn cmd_bench(args: BenchArgs) -> Result<(), Error> {
    let mut cfg = RunMatrixConfig::from_file(&args.config)?;
    if let Some(dir) = args.output_dir {
        cfg.output_dir = dir;
    }
    let outcome = run_bench(&cfg)?;
    println!("run directory {}", outcome.run_dir.display());
    println!(
        "cells {} new solves {}",
        outcome.records.len(),
        outcome.new_solves
    );
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<(), Error> {
    let q = read_instance_file(&args.input)?;
    if let Some(solution_path) = &args.import_solution {
        let bits = solution::read_solution_file(solution_path, q.num_vars())?;
        let energy = q.energy(&bits)?;
        let mut output = serde_json::json!({
            "n": q.num_vars(),
            "energy": energy,
            "bits": bits,
        });
        if let Some(best) = args.best_energy {
            let acc = qubosmith::harness::relative_accuracy(energy, best);
            output["relative_accuracy"] = serde_json::json!(acc.value);
            output["fallback_score"] = serde_json::json!(acc.fallback);
        }
        println!("{}", serde_json::to_string_pretty(&output)?);
        return Ok(());
    }
    let format = args.format.ok_or_else(|| {
        Error::Config("export needs either --format/--out or --import-solution".into())
    })?;
    let out = args
        .out
        .ok_or_else(|| Error::Config("export --format needs --out".into()))?;
    match format {
        ExportFormat::Native => write_instance_file(&q, &out)?,
        ExportFormat::LpText => {
            std::fs::write(&out, export::to_lp_text(&q))?;
        }
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_gset_to_qubo(args: GsetArgs) -> Result<(), Error> {
    let file = std::fs::File::open(&args.input)?;
    let graph = parse_gset(std::io::BufReader::new(file))?;
    let q = maxcut_to_qubo(&graph)?;
    write_instance_file(&q, &args.out)?;
    println!(
        "nodes {} edges {} density {}",
        graph.num_nodes(),
        graph.num_edges(),
        density_display(&q)
    );
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), Error> {
    let records = report::read_records_csv(&args.records)?;
    report::emit_all(&args.out_dir, &records)?;
    println!("reports in {}", args.out_dir.display());
    Ok(())
}
