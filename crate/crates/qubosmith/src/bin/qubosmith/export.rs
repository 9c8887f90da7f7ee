//! LP-text model export.
//!
//! Grammar (CPLEX-LP compatible, accepted by common IP solvers):
//!
//! ```text
//! Minimize
//!  obj: <c> x<i> [+ ...] + [ <2c> x<i> * x<j> [+ ...] ] / 2
//! Subject To
//! Binary
//!  x0 x1 ... x<n-1>
//! End
//! ```
//!
//! Diagonal coefficients become linear terms (binary variables square to
//! themselves); each off-diagonal coefficient `c` appears inside the
//! quadratic bracket as `2c x_i * x_j` because the bracket is divided by
//! two. Zero coefficients are omitted. One term per line keeps every line
//! short of legacy LP line-length limits.

use qubosmith::matrix::QuboMatrix;

pub fn to_lp_text(q: &QuboMatrix) -> String {
    let mut linear: Vec<(usize, f64)> = Vec::new();
    let mut quadratic: Vec<(usize, usize, f64)> = Vec::new();
    for e in q.entries() {
        if e.value == 0.0 {
            continue;
        }
        if e.i == e.j {
            linear.push((e.i as usize, e.value));
        } else {
            quadratic.push((e.i as usize, e.j as usize, e.value));
        }
    }

    let mut out = String::new();
    out.push_str("\\ QUBO instance export: minimize sum_{i<=j} Q_ij x_i x_j over binary x\n");
    out.push_str("Minimize\n obj:");
    let mut first = true;
    for (i, c) in &linear {
        out.push_str(&format!("\n   {} x{i}", signed(*c, first)));
        first = false;
    }
    if !quadratic.is_empty() {
        out.push_str(if first { "\n   [" } else { "\n   + [" });
        let mut q_first = true;
        for (i, j, c) in &quadratic {
            out.push_str(&format!("\n     {} x{i} * x{j}", signed(2.0 * c, q_first)));
            q_first = false;
        }
        out.push_str("\n   ] / 2");
    }
    if first && quadratic.is_empty() {
        // empty objective still needs a term for strict parsers
        out.push_str("\n   0 x0");
    }
    out.push_str("\nSubject To\nBinary\n");
    let mut line = String::from(" ");
    for i in 0..q.num_vars() {
        let var = format!("x{i} ");
        if line.len() + var.len() > 78 {
            out.push_str(line.trim_end());
            out.push('\n');
            line = String::from(" ");
        }
        line.push_str(&var);
    }
    out.push_str(line.trim_end());
    out.push_str("\nEnd\n");
    out
}

/// First term prints a bare (possibly negative) value; later terms get an
/// explicit `+`/`-` separator.
fn signed(c: f64, first: bool) -> String {
    if first {
        format!("{c}")
    } else if c < 0.0 {
        format!("- {}", -c)
    } else {
        format!("+ {c}")
    }
}
