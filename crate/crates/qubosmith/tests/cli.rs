//! End-to-end CLI tests driving the compiled binary.

use std::path::Path;
use std::process::{Command, Output};

fn qubosmith(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qubosmith"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn generate_is_deterministic_and_reports_density() {
    let dir = tempfile::tempdir().unwrap();
    let out = qubosmith(
        &["generate", "--n", "120", "--sigma", "0.1", "--seed", "1", "--out", "a.qubo"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("instance rnd-n120-sig0.1-seed1"));
    assert!(text.contains("entries 7260"));
    assert!(text.contains("density 100.0000%"));

    let again = qubosmith(
        &["generate", "--n", "120", "--sigma", "0.1", "--seed", "1", "--out", "b.qubo"],
        dir.path(),
    );
    assert!(again.status.success());
    let a = std::fs::read(dir.path().join("a.qubo")).unwrap();
    let b = std::fs::read(dir.path().join("b.qubo")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn generate_rejects_zero_n_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = qubosmith(
        &["generate", "--n", "0", "--sigma", "0.1", "--out", "x.qubo"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

fn write_two_var_fixture(dir: &Path) {
    std::fs::write(dir.join("tri.qubo"), "qubo 2 3\n0 0 1\n0 1 -3\n1 1 1\n").unwrap();
}

#[test]
fn solve_brute_force_fixture() {
    let dir = tempfile::tempdir().unwrap();
    write_two_var_fixture(dir.path());
    let out = qubosmith(&["solve", "--in", "tri.qubo", "--solver", "bf"], dir.path());
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["energy"], serde_json::json!(-1.0));
    assert_eq!(json["bits"]["hex"], serde_json::json!("03"));
    assert_eq!(json["solver_id"], serde_json::json!("bf"));
}

#[test]
fn solve_unknown_solver_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write_two_var_fixture(dir.path());
    let out = qubosmith(
        &["solve", "--in", "tri.qubo", "--solver", "walksat"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_missing_instance_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = qubosmith(&["solve", "--in", "nope.qubo", "--solver", "sa"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_routes_decomposition_ids() {
    let dir = tempfile::tempdir().unwrap();
    let gen = qubosmith(
        &["generate", "--n", "40", "--sigma", "0.1", "--seed", "3", "--out", "i.qubo"],
        dir.path(),
    );
    assert!(gen.status.success());
    let out = qubosmith(
        &[
            "solve",
            "--in",
            "i.qubo",
            "--solver",
            "qbsolv-like:ts",
            "--sub-size",
            "30",
            "--inner-reads",
            "3",
            "--timeout-ms",
            "0",
            "--seed",
            "5",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["solver_id"], serde_json::json!("qbsolv-like:ts"));
    assert_eq!(json["metadata"]["sub_size"], serde_json::json!(30));
}

#[test]
fn solve_is_deterministic_modulo_time_fields() {
    let dir = tempfile::tempdir().unwrap();
    let gen = qubosmith(
        &["generate", "--n", "24", "--sigma", "0.1", "--seed", "4", "--out", "i.qubo"],
        dir.path(),
    );
    assert!(gen.status.success());
    let run = || {
        let out = qubosmith(
            &[
                "solve", "--in", "i.qubo", "--solver", "sa", "--seed", "7", "--reads", "5",
                "--sweeps", "20",
            ],
            dir.path(),
        );
        assert!(out.status.success());
        let mut json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        json.as_object_mut().unwrap().remove("solve_time_s");
        json
    };
    assert_eq!(run(), run());
}

#[test]
fn gset_to_qubo_chain() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("g.txt"), "3 3\n1 2 1\n2 3 1\n1 3 1\n").unwrap();
    let out = qubosmith(
        &["gset-to-qubo", "--in", "g.txt", "--out", "g.qubo"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(stdout(&out).contains("nodes 3 edges 3 density 100.0000%"));
    // triangle max cut is 2: minimum energy -2
    let solve = qubosmith(&["solve", "--in", "g.qubo", "--solver", "bf"], dir.path());
    let json: serde_json::Value = serde_json::from_str(&stdout(&solve)).unwrap();
    assert_eq!(json["energy"], serde_json::json!(-2.0));
}

#[test]
fn export_lp_has_expected_term_count() {
    let dir = tempfile::tempdir().unwrap();
    write_two_var_fixture(dir.path());
    let out = qubosmith(
        &["export", "--in", "tri.qubo", "--format", "lp-text", "--out", "tri.lp"],
        dir.path(),
    );
    assert!(out.status.success());
    let lp = std::fs::read_to_string(dir.path().join("tri.lp")).unwrap();
    assert_eq!(lp.matches(" x0").count() >= 1, true);
    // two linear terms, one quadratic product
    assert_eq!(lp.matches('*').count(), 1);
    assert!(lp.contains("Minimize"));
    assert!(lp.contains("Binary"));
    assert!(lp.contains("End"));
}

#[test]
fn export_import_solution_scores_fixture() {
    let dir = tempfile::tempdir().unwrap();
    write_two_var_fixture(dir.path());
    std::fs::write(dir.path().join("sol.txt"), "11\n").unwrap();
    let out = qubosmith(
        &["export", "--in", "tri.qubo", "--import-solution", "sol.txt"],
        dir.path(),
    );
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["energy"], serde_json::json!(-1.0));

    // index-value form with LP-style names
    std::fs::write(dir.path().join("sol2.txt"), "# solution\nx0 1\nx1 1\n").unwrap();
    let out = qubosmith(
        &["export", "--in", "tri.qubo", "--import-solution", "sol2.txt"],
        dir.path(),
    );
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["energy"], serde_json::json!(-1.0));
}

/// Export -> external "solver" (brute force here) -> import reproduces the
/// oracle energy exactly.
#[test]
fn export_import_round_trip_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let gen = qubosmith(
        &["generate", "--n", "10", "--sigma", "1", "--seed", "9", "--out", "i.qubo"],
        dir.path(),
    );
    assert!(gen.status.success());
    let bf = qubosmith(&["solve", "--in", "i.qubo", "--solver", "bf"], dir.path());
    let bf_json: serde_json::Value = serde_json::from_str(&stdout(&bf)).unwrap();
    let oracle_energy = bf_json["energy"].as_f64().unwrap();
    // write the oracle bits as an external solution file
    let hex = bf_json["bits"]["hex"].as_str().unwrap();
    let bits = qubosmith::matrix::BitVector::from_hex(10, hex).unwrap();
    let line: String = bits.iter().map(|b| if b == 1 { '1' } else { '0' }).collect();
    std::fs::write(dir.path().join("ext.sol"), format!("{line}\n")).unwrap();

    let lp = qubosmith(
        &["export", "--in", "i.qubo", "--format", "lp-text", "--out", "i.lp"],
        dir.path(),
    );
    assert!(lp.status.success());
    let scored = qubosmith(
        &["export", "--in", "i.qubo", "--import-solution", "ext.sol"],
        dir.path(),
    );
    let json: serde_json::Value = serde_json::from_str(&stdout(&scored)).unwrap();
    assert_eq!(json["energy"].as_f64().unwrap(), oracle_energy);
}

#[test]
fn bench_and_report_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"
run_id = "cli-bench"
sizes = [16]
sigmas = [0.1]
seed = 2
repetitions = 1
output_dir = "runs"
time_limit_per_solve_s = 0

[[solvers]]
id = "sd"
config = { reads = 3 }

[[solvers]]
id = "sa"
config = { reads = 2, sweeps = 10 }
"#;
    std::fs::write(dir.path().join("cfg.toml"), config).unwrap();
    let out = qubosmith(&["bench", "--config", "cfg.toml"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("new solves 2"));
    let run_dir = dir.path().join("runs/cli-bench");
    assert!(run_dir.join("records.csv").exists());
    assert!(run_dir.join("aggregate.json").exists());
    assert!(run_dir.join("summary.md").exists());
    assert!(run_dir.join("plots/time_vs_n.svg").exists());

    // resume is a no-op
    let resume = qubosmith(&["bench", "--config", "cfg.toml"], dir.path());
    assert!(stdout(&resume).contains("new solves 0"));

    // report re-aggregates elsewhere
    let rep = qubosmith(
        &[
            "report",
            "--records",
            "runs/cli-bench/records.csv",
            "--out-dir",
            "rebuilt",
        ],
        dir.path(),
    );
    assert!(rep.status.success());
    let a = std::fs::read(run_dir.join("aggregate.json")).unwrap();
    let b = std::fs::read(dir.path().join("rebuilt/aggregate.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bench_bad_config_exits_2_before_solving() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.toml"),
        "run_id = \"x\"\nsizes = [8]\nsigmas = [0.1]\n[[solvers]]\nid = \"sa\"\nconfig = { reeds = 1 }\n",
    )
    .unwrap();
    let out = qubosmith(&["bench", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("runs").exists());
}

#[test]
fn thread_cap_env_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    write_two_var_fixture(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_qubosmith"))
        .args(["solve", "--in", "tri.qubo", "--solver", "sa", "--reads", "2", "--sweeps", "5"])
        .env("QUBOSMITH_THREADS", "1")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_qubosmith"))
        .args(["solve", "--in", "tri.qubo", "--solver", "sa"])
        .env("QUBOSMITH_THREADS", "zero")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
