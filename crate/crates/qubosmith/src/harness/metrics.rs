//! Solution-quality and scaling metrics.

use crate::error::{Error, Result};

/// Relative accuracy of a solver's objective against the best objective
/// found across all solvers (1.0 = best known).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct RelAccuracy {
    pub value: f64,
    /// True when the fallback score was used because the best energy was
    /// not negative (the plain ratio is only meaningful for negative
    /// objectives).
    pub fallback: bool,
}

/// `e_solver / e_best` when `e_best < 0`; otherwise the flagged fallback
/// score `1 - (e_solver - e_best) / (|e_best| + 1)`, which is 1.0 for the
/// best solver and strictly smaller for worse ones.
pub fn relative_accuracy(e_solver: f64, e_best: f64) -> RelAccuracy {
    if e_best < 0.0 {
        RelAccuracy {
            value: e_solver / e_best,
            fallback: false,
        }
    } else {
        RelAccuracy {
            value: 1.0 - (e_solver - e_best) / (e_best.abs() + 1.0),
            fallback: true,
        }
    }
}

/// Normalized distance between a proven bound and an incumbent objective:
/// `|bound - incumbent| / |incumbent|`.
pub fn optimality_gap(bound: f64, incumbent: f64) -> Result<f64> {
    if incumbent == 0.0 {
        return Err(Error::Domain(
            "optimality gap undefined for a zero incumbent".into(),
        ));
    }
    Ok((bound - incumbent).abs() / incumbent.abs())
}

/// Least-squares slope of `log(median time)` against `log(n)` for one
/// solver's records. Requires at least four distinct sizes.
pub fn scaling_exponent(points: &[(usize, f64)]) -> Result<f64> {
    let mut distinct: Vec<usize> = points.iter().map(|&(n, _)| n).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "scaling fit needs >= 4 distinct sizes, got {}",
            distinct.len()
        )));
    }
    if points.iter().any(|&(n, t)| n < 1 || !(t > 0.0)) {
        return Err(Error::Domain(
            "scaling fit needs positive sizes and times".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(n, t)| ((n as f64).ln(), t.ln()))
        .collect();
    let m = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in logs {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    Ok(num / den)
}

/// Median of a sample; even-length samples average the two middles.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

/// Mean and population standard deviation.
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    assert!(!values.is_empty());
    let m = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64;
    (m, var.sqrt())
}
