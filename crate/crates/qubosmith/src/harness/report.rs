//! Report emission: records CSV, aggregate JSON, markdown summary and
//! static SVG charts.
//!
//! CSV columns are fixed: `instance_id, n, sigma, density, solver_id,
//! energy, relative_accuracy, solve_time_s, seed, status`. Floats are
//! serialized with 17 significant digits so a read-back is value-exact;
//! `relative_accuracy` is derived per instance group (best solver = 1.0)
//! and left empty on failed rows, as is `energy`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::metrics::{mean_and_std, median, relative_accuracy, RelAccuracy};
use crate::harness::{RunRecord, RunStatus};

pub const CSV_COLUMNS: [&str; 10] = [
    "instance_id",
    "n",
    "sigma",
    "density",
    "solver_id",
    "energy",
    "relative_accuracy",
    "solve_time_s",
    "seed",
    "status",
];

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Relative accuracies per (instance, solver), with the best energy per
/// instance group taken over ok records only.
pub fn compute_accuracies(records: &[RunRecord]) -> BTreeMap<(String, String), RelAccuracy> {
    let mut best: BTreeMap<&str, f64> = BTreeMap::new();
    for r in records {
        if r.status.is_ok() {
            let e = best.entry(r.instance_id.as_str()).or_insert(f64::INFINITY);
            if r.energy < *e {
                *e = r.energy;
            }
        }
    }
    let mut out = BTreeMap::new();
    for r in records {
        if r.status.is_ok() {
            if let Some(&e_best) = best.get(r.instance_id.as_str()) {
                out.insert(
                    (r.instance_id.clone(), r.solver_id.clone()),
                    relative_accuracy(r.energy, e_best),
                );
            }
        }
    }
    out
}

pub fn write_records_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let accuracies = compute_accuracies(records);
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        let rel = accuracies
            .get(&(r.instance_id.clone(), r.solver_id.clone()))
            .map(|a| fmt_f64(a.value))
            .unwrap_or_default();
        let energy = if r.status.is_ok() {
            fmt_f64(r.energy)
        } else {
            String::new()
        };
        w.write_record([
            r.instance_id.as_str(),
            &r.n.to_string(),
            &r.sigma.map(fmt_f64).unwrap_or_else(|| "n/a".to_string()),
            &fmt_f64(r.density),
            r.solver_id.as_str(),
            &energy,
            &rel,
            &fmt_f64(r.solve_time.as_secs_f64()),
            &r.seed.to_string(),
            &r.status.as_csv(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_COLUMNS {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected CSV columns {headers:?}"),
        });
    }
    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row?;
        let line = idx + 2;
        let field = |k: usize| row.get(k).unwrap_or_default();
        let parse_f64 = |k: usize, what: &str| -> Result<f64> {
            field(k).parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid {what} '{}'", field(k)),
            })
        };
        let status = RunStatus::from_csv(field(9));
        let energy = if field(5).is_empty() {
            f64::NAN
        } else {
            parse_f64(5, "energy")?
        };
        records.push(RunRecord {
            instance_id: field(0).to_string(),
            n: field(1).parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid n '{}'", field(1)),
            })?,
            sigma: match field(2) {
                "n/a" | "" => None,
                _ => Some(parse_f64(2, "sigma")?),
            },
            density: parse_f64(3, "density")?,
            solver_id: field(4).to_string(),
            energy,
            solve_time: Duration::from_secs_f64(parse_f64(7, "solve_time_s")?),
            seed: field(8).parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid seed '{}'", field(8)),
            })?,
            status,
            timestamp: 0,
        });
    }
    Ok(records)
}

/// Per-(n, solver) aggregate over instance groups.
#[derive(Clone, Debug, Serialize)]
pub struct GroupStat {
    pub n: usize,
    pub solver_id: String,
    pub instances: usize,
    pub failures: usize,
    pub mean_relative_accuracy: Option<f64>,
    pub std_relative_accuracy: Option<f64>,
    pub median_solve_time_s: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceAccuracy {
    pub instance_id: String,
    pub solver_id: String,
    pub relative_accuracy: f64,
    pub fallback_score: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Aggregate {
    pub per_instance: Vec<InstanceAccuracy>,
    pub per_group: Vec<GroupStat>,
    /// True when any group used the fallback score (non-negative best).
    pub fallback_scoring_used: bool,
}

pub fn aggregate(records: &[RunRecord]) -> Aggregate {
    let accuracies = compute_accuracies(records);
    let per_instance: Vec<InstanceAccuracy> = accuracies
        .iter()
        .map(|((instance_id, solver_id), acc)| InstanceAccuracy {
            instance_id: instance_id.clone(),
            solver_id: solver_id.clone(),
            relative_accuracy: acc.value,
            fallback_score: acc.fallback,
        })
        .collect();

    let mut groups: BTreeMap<(usize, String), (Vec<f64>, Vec<f64>, usize)> = BTreeMap::new();
    for r in records {
        let entry = groups
            .entry((r.n, r.solver_id.clone()))
            .or_insert_with(|| (Vec::new(), Vec::new(), 0));
        if r.status.is_ok() {
            if let Some(acc) = accuracies.get(&(r.instance_id.clone(), r.solver_id.clone())) {
                entry.0.push(acc.value);
            }
            entry.1.push(r.solve_time.as_secs_f64());
        } else {
            entry.2 += 1;
        }
    }
    let per_group: Vec<GroupStat> = groups
        .into_iter()
        .map(|((n, solver_id), (accs, times, failures))| {
            let (mean, std) = if accs.is_empty() {
                (None, None)
            } else {
                let (m, s) = mean_and_std(&accs);
                (Some(m), Some(s))
            };
            GroupStat {
                n,
                solver_id,
                instances: accs.len(),
                failures,
                mean_relative_accuracy: mean,
                std_relative_accuracy: std,
                median_solve_time_s: if times.is_empty() {
                    None
                } else {
                    Some(median(&times))
                },
            }
        })
        .collect();

    Aggregate {
        fallback_scoring_used: per_instance.iter().any(|a| a.fallback_score),
        per_instance,
        per_group,
    }
}

pub fn write_aggregate_json(path: &Path, agg: &Aggregate) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, agg)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn write_summary_md(path: &Path, agg: &Aggregate) -> Result<()> {
    let mut out = String::new();
    out.push_str("# Benchmark summary\n\n");
    out.push_str("| n | solver | instances | failures | mean rel. accuracy | std | median time (s) |\n");
    out.push_str("|---|--------|-----------|----------|--------------------|-----|------------------|\n");
    for g in &agg.per_group {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} |\n",
            g.n,
            g.solver_id,
            g.instances,
            g.failures,
            g.mean_relative_accuracy
                .map(|v| format!("{v:.6}"))
                .unwrap_or_else(|| "-".into()),
            g.std_relative_accuracy
                .map(|v| format!("{v:.6}"))
                .unwrap_or_else(|| "-".into()),
            g.median_solve_time_s
                .map(|v| format!("{v:.6}"))
                .unwrap_or_else(|| "-".into()),
        ));
    }
    if agg.fallback_scoring_used {
        out.push_str("\nNote: at least one instance group had a non-negative best energy; the flagged fallback accuracy score was used there.\n");
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Emits the full report directory layout: `records.csv`, `aggregate.json`,
/// `summary.md` and `plots/*.svg`.
pub fn emit_all(dir: &Path, records: &[RunRecord]) -> Result<Aggregate> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no records to report".into()));
    }
    std::fs::create_dir_all(dir)?;
    write_records_csv(&dir.join("records.csv"), records)?;
    let agg = aggregate(records);
    write_aggregate_json(&dir.join("aggregate.json"), &agg)?;
    write_summary_md(&dir.join("summary.md"), &agg)?;
    let plots = dir.join("plots");
    std::fs::create_dir_all(&plots)?;
    write_plots(&plots, &agg)?;
    Ok(agg)
}

/// Two line charts: relative accuracy vs n (log x) and median time vs n
/// (log-log).
pub fn write_plots(dir: &Path, agg: &Aggregate) -> Result<(PathBuf, PathBuf)> {
    let mut solvers: Vec<String> = agg.per_group.iter().map(|g| g.solver_id.clone()).collect();
    solvers.sort();
    solvers.dedup();

    let accuracy_series: Vec<(String, Vec<(f64, f64)>)> = solvers
        .iter()
        .map(|s| {
            let pts = agg
                .per_group
                .iter()
                .filter(|g| &g.solver_id == s)
                .filter_map(|g| g.mean_relative_accuracy.map(|a| (g.n as f64, a)))
                .collect();
            (s.clone(), pts)
        })
        .collect();
    let time_series: Vec<(String, Vec<(f64, f64)>)> = solvers
        .iter()
        .map(|s| {
            let pts = agg
                .per_group
                .iter()
                .filter(|g| &g.solver_id == s)
                .filter_map(|g| g.median_solve_time_s.map(|t| (g.n as f64, t)))
                .collect();
            (s.clone(), pts)
        })
        .collect();

    let acc_path = dir.join("accuracy_vs_n.svg");
    std::fs::write(
        &acc_path,
        line_chart(
            "relative accuracy vs n",
            "n (log)",
            "relative accuracy",
            &accuracy_series,
            true,
            false,
        ),
    )?;
    let time_path = dir.join("time_vs_n.svg");
    std::fs::write(
        &time_path,
        line_chart(
            "median solve time vs n",
            "n (log)",
            "time, s (log)",
            &time_series,
            true,
            true,
        ),
    )?;
    Ok((acc_path, time_path))
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(String, Vec<(f64, f64)>)],
    log_x: bool,
    log_y: bool,
) -> String {
    const W: f64 = 720.0;
    const H: f64 = 480.0;
    const M: f64 = 60.0; // margin

    let tx = |v: f64| if log_x { v.max(1e-300).log10() } else { v };
    let ty = |v: f64| if log_y { v.max(1e-300).log10() } else { v };

    let points: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, pts)| pts.iter().map(|&(x, y)| (tx(x), ty(y))))
        .collect();
    let (x_min, x_max) = bounds(points.iter().map(|p| p.0));
    let (y_min, y_max) = bounds(points.iter().map(|p| p.1));

    let sx = move |v: f64| M + (v - x_min) / (x_max - x_min) * (W - 2.0 * M);
    let sy = move |v: f64| H - M - (v - y_min) / (y_max - y_min) * (H - 2.0 * M);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{title}</text>\n",
        W / 2.0
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{M}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n",
        H - M,
        W - M
    ));
    svg.push_str(&format!(
        "<line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - M
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{x_label}</text>\n",
        W / 2.0,
        H - 16.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 {})\">{y_label}</text>\n",
        H / 2.0,
        H / 2.0
    ));
    // axis extremes
    for (v, px) in [(x_min, sx(x_min)), (x_max, sx(x_max))] {
        let shown = if log_x { 10f64.powf(v) } else { v };
        svg.push_str(&format!(
            "<text x=\"{px}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">{shown:.4}</text>\n",
            H - M + 16.0
        ));
    }
    for (v, py) in [(y_min, sy(y_min)), (y_max, sy(y_max))] {
        let shown = if log_y { 10f64.powf(v) } else { v };
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{py}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{shown:.4}</text>\n",
            M - 6.0
        ));
    }
    // series
    for (k, (name, pts)) in series.iter().enumerate() {
        if pts.is_empty() {
            continue;
        }
        let color = PALETTE[k % PALETTE.len()];
        let mut sorted = pts.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = sorted
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(tx(x)), sy(ty(y))))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            path.join(" ")
        ));
        for &(x, y) in &sorted {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{color}\"/>\n",
                sx(tx(x)),
                sy(ty(y))
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{name}</text>\n",
            W - M + 4.0,
            M + 16.0 * k as f64
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if !min.is_finite() || !max.is_finite() {
        return (0.0, 1.0);
    }
    if min == max {
        (min - 0.5, max + 0.5)
    } else {
        (min, max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(instance: &str, n: usize, solver: &str, energy: f64, t: f64) -> RunRecord {
        RunRecord {
            instance_id: instance.to_string(),
            n,
            sigma: Some(0.1),
            density: 1.0,
            solver_id: solver.to_string(),
            energy,
            solve_time: Duration::from_secs_f64(t),
            seed: 7,
            status: RunStatus::Ok,
            timestamp: 0,
        }
    }

    #[test]
    fn equal_energies_both_score_one() {
        let records = vec![rec("a", 8, "sa", -3.0, 0.1), rec("a", 8, "sd", -3.0, 0.2)];
        let acc = compute_accuracies(&records);
        assert_eq!(acc[&("a".into(), "sa".into())].value, 1.0);
        assert_eq!(acc[&("a".into(), "sd".into())].value, 1.0);
    }

    #[test]
    fn only_best_scores_one_on_negative_groups() {
        let records = vec![
            rec("a", 8, "sa", -4.0, 0.1),
            rec("a", 8, "sd", -3.0, 0.2),
            rec("a", 8, "ts", -4.0, 0.3),
        ];
        let acc = compute_accuracies(&records);
        assert_eq!(acc[&("a".into(), "sa".into())].value, 1.0);
        assert_eq!(acc[&("a".into(), "ts".into())].value, 1.0);
        assert!(acc[&("a".into(), "sd".into())].value < 1.0);
    }

    #[test]
    fn csv_round_trip_preserves_numbers_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.csv");
        let records = vec![
            rec("a", 8, "sa", -3.123456789012345, 0.987654321098765),
            rec("b", 16, "sd", -1.0e-7, 1.23e-4),
            RunRecord {
                status: RunStatus::Failed("solver exploded, sadly".into()),
                energy: f64::NAN,
                ..rec("c", 4, "bf", 0.0, 0.0)
            },
        ];
        write_records_csv(&path, &records).unwrap();
        let back = read_records_csv(&path).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in records.iter().zip(&back) {
            assert_eq!(a.instance_id, b.instance_id);
            assert_eq!(a.n, b.n);
            assert_eq!(a.solver_id, b.solver_id);
            if a.status.is_ok() {
                assert_eq!(a.energy.to_bits(), b.energy.to_bits());
            } else {
                assert!(b.energy.is_nan());
            }
            assert_eq!(a.solve_time, b.solve_time);
            assert_eq!(a.status, b.status);
        }
    }

    #[test]
    fn aggregate_matches_hand_computation() {
        // four instances at one size, one solver pair
        let mut records = Vec::new();
        let energies_sa = [-10.0, -8.0, -9.0, -12.0];
        let energies_sd = [-5.0, -8.0, -6.0, -6.0];
        for (k, (ea, ed)) in energies_sa.iter().zip(&energies_sd).enumerate() {
            records.push(rec(&format!("i{k}"), 32, "sa", *ea, 0.5));
            records.push(rec(&format!("i{k}"), 32, "sd", *ed, 0.1));
        }
        let agg = aggregate(&records);
        let sa = agg
            .per_group
            .iter()
            .find(|g| g.solver_id == "sa")
            .unwrap();
        // sa is best on every instance
        assert_eq!(sa.mean_relative_accuracy.unwrap(), 1.0);
        assert_eq!(sa.std_relative_accuracy.unwrap(), 0.0);
        let sd = agg
            .per_group
            .iter()
            .find(|g| g.solver_id == "sd")
            .unwrap();
        // hand-computed: 0.5, 1.0, 2/3, 0.5 -> mean 2/3
        let expected: Vec<f64> = vec![0.5, 1.0, 2.0 / 3.0, 0.5];
        let (m, s) = mean_and_std(&expected);
        assert!((sd.mean_relative_accuracy.unwrap() - m).abs() < 1e-12);
        assert!((sd.std_relative_accuracy.unwrap() - s).abs() < 1e-12);
        assert_eq!(sd.failures, 0);
    }

    #[test]
    fn aggregates_are_permutation_invariant() {
        let mut records = vec![
            rec("a", 8, "sa", -4.0, 0.3),
            rec("a", 8, "sd", -3.0, 0.2),
            rec("b", 8, "sa", -6.0, 0.1),
            rec("b", 8, "sd", -6.0, 0.4),
        ];
        let a = serde_json::to_string(&aggregate(&records)).unwrap();
        records.reverse();
        let b = serde_json::to_string(&aggregate(&records)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn emit_all_writes_layout() {
        let dir = tempfile::tempdir().unwrap();
        let records = vec![rec("a", 8, "sa", -4.0, 0.3), rec("a", 8, "sd", -3.0, 0.2)];
        emit_all(dir.path(), &records).unwrap();
        for name in ["records.csv", "aggregate.json", "summary.md"] {
            assert!(dir.path().join(name).exists(), "{name} missing");
        }
        assert!(dir.path().join("plots/accuracy_vs_n.svg").exists());
        assert!(dir.path().join("plots/time_vs_n.svg").exists());
        let svg = std::fs::read_to_string(dir.path().join("plots/time_vs_n.svg")).unwrap();
        assert!(svg.contains("<svg"));
        assert!(svg.contains("polyline"));
    }
}
