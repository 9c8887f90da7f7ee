//! External-solution ingestion for the scoring path.
//!
//! Accepted forms, decided per file:
//! - a single line of exactly `n` characters from `{0, 1}`;
//! - one `index value` pair per line (0-based, value 0 or 1); unlisted
//!   variables default to 0. Lines starting with `#` and blanks are
//!   ignored; an optional leading `x` on the index is accepted so LP-style
//!   variable names (`x17 1`) work as-is.

use std::path::Path;

use qubosmith::error::Error;
use qubosmith::matrix::BitVector;

pub fn read_solution_file(path: &Path, n: usize) -> Result<BitVector, Error> {
    let text = std::fs::read_to_string(path)?;
    let lines: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if lines.len() == 1 && lines[0].len() == n && lines[0].chars().all(|c| c == '0' || c == '1') {
        let bits: Vec<u8> = lines[0].chars().map(|c| (c == '1') as u8).collect();
        return Ok(BitVector::from_bits(&bits));
    }
    let mut bits = vec![0u8; n];
    let mut seen = vec![false; n];
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let index_token = tokens.next().unwrap_or_default();
        let value_token = tokens.next().ok_or_else(|| Error::Parse {
            line: line_no,
            message: "expected 'index value'".into(),
        })?;
        if tokens.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "trailing tokens".into(),
            });
        }
        let index: usize = index_token
            .strip_prefix('x')
            .unwrap_or(index_token)
            .parse()
            .map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid variable index '{index_token}'"),
            })?;
        if index >= n {
            return Err(Error::Parse {
                line: line_no,
                message: format!("variable index {index} out of range for n = {n}"),
            });
        }
        let value: u8 = match value_token {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("binary value expected, got '{other}'"),
                })
            }
        };
        if seen[index] {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate assignment for variable {index}"),
            });
        }
        seen[index] = true;
        bits[index] = value;
    }
    Ok(BitVector::from_bits(&bits))
}
