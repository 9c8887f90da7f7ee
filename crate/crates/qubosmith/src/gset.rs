//! Max-Cut graphs in G-set format and the graph-to-QUBO reduction.
//!
//! G-set files carry a `num_nodes num_edges` header followed by one
//! `u v w` line per edge with 1-based node indices. Parsed graphs are
//! 0-based. These instances are the sparse contrast class to the fully
//! dense random benchmark family.

use std::collections::HashSet;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::matrix::{BitVector, QuboBuilder, QuboMatrix};

/// Weighted undirected graph, 0-based, no self-loops or duplicate edges.
#[derive(Clone, Debug)]
pub struct Graph {
    num_nodes: usize,
    edges: Vec<(u32, u32, f64)>,
}

impl Graph {
    /// Validates and canonicalizes (`u < v` per edge).
    pub fn new(num_nodes: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut canonical = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            if u == v {
                return Err(Error::Domain(format!("self-loop on node {u}")));
            }
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::IndexOutOfRange {
                    index: u.max(v),
                    n: num_nodes,
                });
            }
            if !w.is_finite() {
                return Err(Error::NonFinite { i: u, j: v });
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if !seen.insert((a, b)) {
                return Err(Error::Domain(format!("duplicate edge ({a}, {b})")));
            }
            canonical.push((a as u32, b as u32, w));
        }
        Ok(Self {
            num_nodes,
            edges: canonical,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32, f64)] {
        &self.edges
    }
}

/// Parses G-set text. Errors name the offending 1-based line number.
pub fn parse_gset(r: impl BufRead) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        match header {
            None => {
                let nodes: usize = parse_token(tokens.next(), line_no, "node count")?;
                let edge_count: usize = parse_token(tokens.next(), line_no, "edge count")?;
                if tokens.next().is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "trailing tokens after header".into(),
                    });
                }
                header = Some((nodes, edge_count));
                edges.reserve(edge_count);
            }
            Some((nodes, edge_count)) => {
                if edges.len() == edge_count {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("more than the declared {edge_count} edges"),
                    });
                }
                let u: usize = parse_token(tokens.next(), line_no, "node index")?;
                let v: usize = parse_token(tokens.next(), line_no, "node index")?;
                let w: f64 = parse_token(tokens.next(), line_no, "edge weight")?;
                if tokens.next().is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "trailing tokens after edge".into(),
                    });
                }
                if u == 0 || v == 0 || u > nodes || v > nodes {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("node index out of range 1..={nodes}"),
                    });
                }
                if u == v {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("self-loop on node {u}"),
                    });
                }
                edges.push((u - 1, v - 1, w));
            }
        }
    }
    let (nodes, edge_count) = header.ok_or(Error::Parse {
        line: 1,
        message: "empty G-set file".into(),
    })?;
    if edges.len() != edge_count {
        return Err(Error::Parse {
            line: 0,
            message: format!(
                "header declares {edge_count} edges but file has {}",
                edges.len()
            ),
        });
    }
    Graph::new(nodes, edges).map_err(|e| match e {
        Error::Domain(message) => Error::Parse { line: 0, message },
        other => other,
    })
}

/// Minimization QUBO whose optimum is a maximum cut: per edge `(u, v, w)`,
/// `Q_uv += 2w`, `Q_uu -= w`, `Q_vv -= w`. Then `energy(Q, x) = -cut(x)`
/// for every partition `x`.
pub fn maxcut_to_qubo(g: &Graph) -> Result<QuboMatrix> {
    let mut b = QuboBuilder::new(g.num_nodes)?;
    for &(u, v, w) in &g.edges {
        let (u, v) = (u as usize, v as usize);
        b.add(u, v, 2.0 * w)?;
        b.add(u, u, -w)?;
        b.add(v, v, -w)?;
    }
    b.build()
}

/// Total weight of edges crossing the partition `x`.
pub fn cut_value(g: &Graph, x: &BitVector) -> Result<f64> {
    if x.len() != g.num_nodes {
        return Err(Error::DimensionMismatch {
            expected: g.num_nodes,
            got: x.len(),
        });
    }
    Ok(g
        .edges
        .iter()
        .filter(|&&(u, v, _)| x.get(u as usize) != x.get(v as usize))
        .map(|&(_, _, w)| w)
        .sum())
}

/// Interaction density: stored off-diagonal couplers over `C(n, 2)`.
pub fn density(n: usize, interaction_count: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "density undefined for n = {n} (< 2)"
        )));
    }
    let max_pairs = n as u128 * (n as u128 - 1) / 2;
    if interaction_count as u128 > max_pairs {
        return Err(Error::Domain(format!(
            "{interaction_count} interactions exceed C({n}, 2) = {max_pairs}"
        )));
    }
    Ok(interaction_count as f64 / max_pairs as f64)
}

/// Density as a percentage with exactly four decimal places, truncated
/// (e.g. 19,176 interactions over 800 nodes prints `6.0000`). Computed in
/// integer arithmetic so the printed digits are exact.
pub fn density_percent_4dp(n: usize, interaction_count: usize) -> Result<String> {
    density(n, interaction_count)?; // domain checks
    let max_pairs = n as u128 * (n as u128 - 1) / 2;
    // percent scaled by 10^4, truncated
    let scaled = interaction_count as u128 * 1_000_000 / max_pairs;
    Ok(format!("{}.{:04}", scaled / 10_000, scaled % 10_000))
}

fn parse_token<T: std::str::FromStr>(
    token: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T> {
    let token = token.ok_or_else(|| Error::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what} '{token}'"),
    })
}
