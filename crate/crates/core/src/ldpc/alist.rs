//! The alist sparse-matrix text format.
//!
//! ```text
//! n m
//! max_col_degree max_row_degree
//! <n column degrees>
//! <m row degrees>
//! <n lines: 1-based row indices of each column, zero padded>
//! <m lines: 1-based column indices of each row, zero padded>
//! ```

use super::ParityCheckMatrix;
use crate::{Error, Result};
use std::fmt::Write;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next non-blank line as (1-based line number, tokens).
    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>)> {
        for (i, line) in self.inner.by_ref() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| Error::Alist {
                        line: i + 1,
                        msg: format!("'{t}' is not a non-negative integer"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((i + 1, nums));
        }
        Err(Error::Alist {
            line: 0,
            msg: format!("unexpected end of input while reading {what}"),
        })
    }
}

fn expect_len(line: usize, got: &[usize], want: usize, what: &str) -> Result<()> {
    if got.len() != want {
        return Err(Error::Alist {
            line,
            msg: format!("{what}: expected {want} values, found {}", got.len()),
        });
    }
    Ok(())
}

/// Parses an alist description, checking the degree lists against both
/// connection lists.
pub fn load_alist(text: &str) -> Result<ParityCheckMatrix> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (l, dims) = lines.next_numbers("dimensions")?;
    expect_len(l, &dims, 2, "dimensions")?;
    let (n, m) = (dims[0], dims[1]);
    let (l, maxes) = lines.next_numbers("maximum degrees")?;
    expect_len(l, &maxes, 2, "maximum degrees")?;
    let (l, col_deg) = lines.next_numbers("column degrees")?;
    expect_len(l, &col_deg, n, "column degrees")?;
    let (l, row_deg) = lines.next_numbers("row degrees")?;
    expect_len(l, &row_deg, m, "row degrees")?;
    if col_deg.iter().copied().max().unwrap_or(0) > maxes[0]
        || row_deg.iter().copied().max().unwrap_or(0) > maxes[1]
    {
        return Err(Error::Alist {
            line: l,
            msg: "degree exceeds the declared maximum".into(),
        });
    }

    let mut col_lists = Vec::with_capacity(n);
    for (c, &deg) in col_deg.iter().enumerate() {
        let (l, ids) = lines.next_numbers("column connections")?;
        col_lists.push(parse_connections(l, &ids, deg, m, "row", c)?);
    }
    let mut row_lists = Vec::with_capacity(m);
    for (r, &deg) in row_deg.iter().enumerate() {
        let (l, ids) = lines.next_numbers("row connections")?;
        row_lists.push((l, parse_connections(l, &ids, deg, n, "column", r)?));
    }

    // the column lists must be the transpose of the row lists
    let mut transpose = vec![Vec::new(); n];
    for (r, (_, row)) in row_lists.iter().enumerate() {
        for &c in row {
            transpose[c].push(r);
        }
    }
    for (c, (want, got)) in col_lists.iter().zip(&transpose).enumerate() {
        let mut want = want.clone();
        want.sort_unstable();
        if &want != got {
            let line = row_lists.first().map(|x| x.0).unwrap_or(0);
            return Err(Error::Alist {
                line,
                msg: format!("column {} connections disagree with the row lists", c + 1),
            });
        }
    }

    ParityCheckMatrix::from_rows(n, row_lists.into_iter().map(|(_, r)| r).collect())
}

fn parse_connections(
    line: usize,
    ids: &[usize],
    degree: usize,
    bound: usize,
    kind: &str,
    owner: usize,
) -> Result<Vec<usize>> {
    let nonzero: Vec<usize> = ids.iter().copied().filter(|&v| v != 0).collect();
    if nonzero.len() != degree {
        return Err(Error::Alist {
            line,
            msg: format!(
                "entry {} lists {} connections but its degree is {degree}",
                owner + 1,
                nonzero.len()
            ),
        });
    }
    if ids[..degree].contains(&0) {
        return Err(Error::Alist {
            line,
            msg: "zero padding before the last connection".into(),
        });
    }
    nonzero
        .into_iter()
        .map(|v| {
            if v > bound {
                Err(Error::Alist {
                    line,
                    msg: format!("{kind} index {v} out of range 1..={bound}"),
                })
            } else {
                Ok(v - 1)
            }
        })
        .collect()
}

/// Canonical alist text: sorted indices, zero padding to the maximum degree,
/// single spaces, one trailing newline.
pub fn write_alist(h: &ParityCheckMatrix) -> String {
    let max_col = h.cols().iter().map(Vec::len).max().unwrap_or(0);
    let max_row = h.rows().iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    let join = |v: Vec<usize>| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let padded = |list: &[usize], width: usize| {
        let mut v: Vec<usize> = list.iter().map(|x| x + 1).collect();
        v.resize(width, 0);
        v
    };
    writeln!(out, "{} {}", h.n(), h.m()).unwrap();
    writeln!(out, "{max_col} {max_row}").unwrap();
    writeln!(out, "{}", join(h.cols().iter().map(Vec::len).collect())).unwrap();
    writeln!(out, "{}", join(h.rows().iter().map(Vec::len).collect())).unwrap();
    for c in h.cols() {
        writeln!(out, "{}", join(padded(c, max_col))).unwrap();
    }
    for r in h.rows() {
        writeln!(out, "{}", join(padded(r, max_row))).unwrap();
    }
    out
}
