//! MacKay alist format.
//!
//! ```text
//! n m
//! max_col_degree max_row_degree
//! col degrees (n values)
//! row degrees (m values)
//! n lines: 1-based row indices of each column, zero padded
//! m lines: 1-based column indices of each row, zero padded
//! ```

use std::fmt::Write;

use super::SparseParityCheck;
use crate::error::{Error, Result};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line as parsed integers, with its 1-based line number.
    fn next_ints(&mut self, what: &str) -> Result<(usize, Vec<usize>)> {
        for (idx, line) in self.inner.by_ref() {
            self.last = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let ints = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| Error::Alist {
                        line: idx + 1,
                        msg: format!("malformed integer {tok:?} in {what}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((idx + 1, ints));
        }
        Err(Error::Alist {
            line: self.last + 1,
            msg: format!("unexpected end of input, expected {what}"),
        })
    }

    /// Reads exactly `count` integers, possibly spread over several lines.
    fn take_ints(&mut self, count: usize, what: &str) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let (line, ints) = self.next_ints(what)?;
            if out.len() + ints.len() > count {
                return Err(Error::Alist {
                    line,
                    msg: format!("too many values in {what}"),
                });
            }
            out.extend(ints);
        }
        Ok(out)
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Alist {
        line,
        msg: msg.into(),
    }
}

pub fn parse_alist(text: &str) -> Result<SparseParityCheck> {
    let mut lines = Lines::new(text);

    let (hline, header) = lines.next_ints("header")?;
    let [n, m] = header[..] else {
        return Err(err(hline, "malformed header, expected \"n m\""));
    };
    if n == 0 || m == 0 {
        return Err(err(hline, "malformed header, dimensions must be positive"));
    }
    let (dline, maxes) = lines.next_ints("maximum degrees")?;
    let [max_col, max_row] = maxes[..] else {
        return Err(err(dline, "malformed header, expected maximum degrees"));
    };
    let col_deg = lines.take_ints(n, "column degrees")?;
    let row_deg = lines.take_ints(m, "row degrees")?;
    if col_deg.iter().any(|&d| d > max_col) || row_deg.iter().any(|&d| d > max_row) {
        return Err(err(dline, "degree exceeds declared maximum"));
    }

    let mut cols = Vec::with_capacity(n);
    for (j, &deg) in col_deg.iter().enumerate() {
        let (line, ints) = lines.next_ints("column adjacency")?;
        let entries = adjacency(line, ints, deg, m, max_col)?;
        if entries.is_empty() {
            return Err(err(line, format!("column {} is empty", j + 1)));
        }
        cols.push(entries);
    }
    let mut rows = Vec::with_capacity(m);
    let mut row_lines = Vec::with_capacity(m);
    for &deg in &row_deg {
        let (line, ints) = lines.next_ints("row adjacency")?;
        rows.push(adjacency(line, ints, deg, n, max_row)?);
        row_lines.push(line);
    }

    // the two adjacency lists must describe the same matrix
    for (i, row) in rows.iter().enumerate() {
        if let Some(&j) = row.iter().find(|&&j| cols[j].binary_search(&i).is_err()) {
            return Err(err(
                row_lines[i],
                format!("inconsistent adjacency: row {} lists column {} which does not list it", i + 1, j + 1),
            ));
        }
    }
    let edges_rows: usize = rows.iter().map(Vec::len).sum();
    let edges_cols: usize = cols.iter().map(Vec::len).sum();
    if edges_rows != edges_cols {
        return Err(err(
            lines.last,
            "inconsistent adjacency: column lists contain entries missing from row lists",
        ));
    }

    SparseParityCheck::from_rows(n, rows)
}

/// Converts one 1-based, zero-padded adjacency line to sorted 0-based indices.
fn adjacency(line: usize, ints: Vec<usize>, deg: usize, bound: usize, max_deg: usize) -> Result<Vec<usize>> {
    if ints.len() > max_deg.max(deg) {
        return Err(err(line, format!("{} entries exceed maximum degree {max_deg}", ints.len())));
    }
    let mut entries: Vec<usize> = ints.into_iter().filter(|&x| x != 0).collect();
    if entries.len() != deg {
        return Err(err(line, format!("expected {deg} entries, found {}", entries.len())));
    }
    if let Some(&x) = entries.iter().find(|&&x| x > bound) {
        return Err(err(line, format!("index {x} out of range 1..={bound}")));
    }
    entries.iter_mut().for_each(|x| *x -= 1);
    entries.sort_unstable();
    if entries.windows(2).any(|w| w[0] == w[1]) {
        return Err(err(line, "duplicate index"));
    }
    Ok(entries)
}

pub fn serialize_alist(h: &SparseParityCheck) -> String {
    let (max_col, max_row) = (h.max_col_degree(), h.max_row_degree());
    let mut out = String::new();
    let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "{} {}", h.n_cols(), h.n_rows());
    let _ = writeln!(out, "{max_col} {max_row}");
    let _ = writeln!(out, "{}", join(&mut h.cols().iter().map(Vec::len)));
    let _ = writeln!(out, "{}", join(&mut h.rows().iter().map(Vec::len)));
    for (lists, width) in [(h.cols(), max_col), (h.rows(), max_row)] {
        for list in lists {
            let padded = list.iter().map(|&x| x + 1).chain(std::iter::repeat(0)).take(width);
            let _ = writeln!(out, "{}", join(&mut padded.into_iter()));
        }
    }
    out
}
