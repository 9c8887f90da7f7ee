//! Native instance file format.
//!
//! Line-oriented text: a header `qubo <n> <entry_count>` followed by one
//! `i j value` triple per line (0-based, `i <= j`, decimal or scientific
//! notation). Lines starting with `#` and blank lines are ignored. Values
//! are written with Rust's shortest round-trip formatting, so
//! write-then-read is exact for every f64.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{QuboBuilder, QuboMatrix};

pub fn write_instance(q: &QuboMatrix, mut w: impl Write) -> Result<()> {
    writeln!(w, "qubo {} {}", q.num_vars(), q.entry_count())?;
    for e in q.entries() {
        writeln!(w, "{} {} {}", e.i, e.j, e.value)?;
    }
    Ok(())
}

pub fn write_instance_file(q: &QuboMatrix, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    write_instance(q, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_instance(r: impl BufRead) -> Result<QuboMatrix> {
    let mut header: Option<(usize, usize)> = None;
    let mut builder: Option<QuboBuilder> = None;
    let mut seen = 0usize;
    for (idx, line) in r.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        match header {
            None => {
                let tag = tokens.next();
                if tag != Some("qubo") {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "expected header 'qubo <n> <entry_count>'".into(),
                    });
                }
                let n: usize = parse_token(tokens.next(), line_no, "variable count")?;
                let count: usize = parse_token(tokens.next(), line_no, "entry count")?;
                if tokens.next().is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "trailing tokens after header".into(),
                    });
                }
                header = Some((n, count));
                builder = Some(QuboBuilder::new(n)?);
            }
            Some((_, count)) => {
                if seen == count {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("more than the declared {count} entries"),
                    });
                }
                let i: usize = parse_token(tokens.next(), line_no, "row index")?;
                let j: usize = parse_token(tokens.next(), line_no, "column index")?;
                let v: f64 = parse_token(tokens.next(), line_no, "value")?;
                if tokens.next().is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "trailing tokens after entry".into(),
                    });
                }
                builder.as_mut().unwrap().add(i, j, v)?;
                seen += 1;
            }
        }
    }
    let (_, count) = header.ok_or(Error::Parse {
        line: 1,
        message: "empty instance file".into(),
    })?;
    if seen != count {
        return Err(Error::Parse {
            line: 0,
            message: format!("header declares {count} entries but file has {seen}"),
        });
    }
    builder.unwrap().build()
}

pub fn read_instance_file(path: impl AsRef<Path>) -> Result<QuboMatrix> {
    let file = File::open(path)?;
    read_instance(BufReader::new(file))
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
