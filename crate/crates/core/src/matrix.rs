//! Candidate hash-family matrices and their text file format.
//!
//! ```text
//! PHF N n m w
//! a_11 a_12 … a_1n
//! …
//! a_N1 a_N2 … a_Nn
//! ```
//!
//! A separating family uses the header `SHF N n m w1,w2,…,ws` with parts in
//! non-increasing order. Entries are in `1..=m`, separated by single spaces,
//! and every line ends with `\n`.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::bounds::{FamilySpec, ShfSpec};
use crate::cluster_expansion::PhfSpec;
use crate::error::{Error, Result};

/// An `N × n` matrix over the alphabet `1..=m`, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HashMatrix {
    rows: usize,
    cols: usize,
    alphabet: u64,
    entries: Vec<u32>,
}

impl HashMatrix {
    pub fn new(rows: usize, cols: usize, alphabet: u64, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidSpec(format!(
                "{} entries do not fill a {rows}×{cols} matrix",
                entries.len()
            )));
        }
        if alphabet > u32::MAX as u64 {
            return Err(Error::InvalidSpec(format!(
                "alphabet size {alphabet} is too large"
            )));
        }
        if let Some(bad) = entries.iter().find(|&&e| e == 0 || e as u64 > alphabet) {
            return Err(Error::InvalidSpec(format!(
                "entry {bad} outside the alphabet 1..={alphabet}"
            )));
        }
        Ok(Self {
            rows,
            cols,
            alphabet,
            entries,
        })
    }

    /// Builds a matrix from nested rows; convenient for small hand-written cases.
    pub fn from_rows(alphabet: u64, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidSpec("rows have different lengths".into()));
        }
        Self::new(rows.len(), cols, alphabet, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn alphabet(&self) -> u64 {
        self.alphabet
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[u32]> {
        self.entries.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.cols + col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, value: u32) {
        debug_assert!(value >= 1 && value as u64 <= self.alphabet);
        self.entries[row * self.cols + col] = value;
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }
}

/// Header line of a matrix file.
pub fn header_line(spec: &FamilySpec, rows: usize) -> String {
    match spec {
        FamilySpec::Phf(s) => format!("PHF {rows} {} {} {}", s.n, s.m, s.w),
        FamilySpec::Shf(s) => {
            let parts: Vec<String> = s.parts.iter().map(ToString::to_string).collect();
            format!("SHF {rows} {} {} {}", s.n, s.m, parts.join(","))
        }
    }
}

/// Renders the file contents.
pub fn format_matrix(spec: &FamilySpec, matrix: &HashMatrix) -> String {
    let mut out = header_line(spec, matrix.rows());
    out.push('\n');
    for row in matrix.iter_rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            write!(out, "{v}").expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    out
}

pub fn write_matrix<W: Write>(
    out: &mut W,
    spec: &FamilySpec,
    matrix: &HashMatrix,
) -> io::Result<()> {
    out.write_all(format_matrix(spec, matrix).as_bytes())
}

/// Whitespace-separated tokens with their 1-based starting columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split(' ')
        .scan(1usize, |col, tok| {
            let start = *col;
            *col += tok.chars().count() + 1;
            Some((start, tok))
        })
        .filter(|(_, tok)| !tok.is_empty())
}

fn number<T: std::str::FromStr>(line: usize, column: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, column, format!("expected {what}, found `{tok}`")))
}

/// Parses a matrix file, returning the family it claims to be and its entries.
pub fn parse_matrix(text: &str) -> Result<(FamilySpec, HashMatrix)> {
    let mut lines = text
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, 1, "empty file"))?;
    let head: Vec<(usize, &str)> = tokens(header).collect();
    if head.len() != 5 {
        return Err(Error::parse(
            1,
            head.get(5).map_or(header.len() + 1, |t| t.0),
            format!(
                "header needs 5 fields (`PHF N n m w` or `SHF N n m w1,…,ws`), found {}",
                head.len()
            ),
        ));
    }
    let rows: usize = number(1, head[1].0, head[1].1, "row count N")?;
    let n: usize = number(1, head[2].0, head[2].1, "column count n")?;
    let m: u64 = number(1, head[3].0, head[3].1, "alphabet size m")?;
    let spec = match head[0].1 {
        "PHF" => {
            let w: usize = number(1, head[4].0, head[4].1, "subset size w")?;
            FamilySpec::Phf(
                PhfSpec::new(n, m, w).map_err(|e| Error::parse(1, head[4].0, e.to_string()))?,
            )
        }
        "SHF" => {
            let parts = head[4]
                .1
                .split(',')
                .map(|p| number::<usize>(1, head[4].0, p, "part size"))
                .collect::<Result<Vec<_>>>()?;
            FamilySpec::Shf(
                ShfSpec::new(n, m, parts).map_err(|e| Error::parse(1, head[4].0, e.to_string()))?,
            )
        }
        other => {
            return Err(Error::parse(
                1,
                head[0].0,
                format!("unknown family `{other}`, expected PHF or SHF"),
            ))
        }
    };

    let mut entries = Vec::with_capacity(rows * n);
    let mut seen = 0usize;
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            if seen == rows {
                continue;
            }
            return Err(Error::parse(
                lineno,
                1,
                format!("blank line where row {} was expected", seen + 1),
            ));
        }
        if seen == rows {
            return Err(Error::parse(
                lineno,
                1,
                format!("more than the {rows} rows declared in the header"),
            ));
        }
        let mut count = 0usize;
        for (col, tok) in tokens(line) {
            count += 1;
            if count > n {
                return Err(Error::parse(
                    lineno,
                    col,
                    format!("row has more than {n} entries"),
                ));
            }
            let v: u64 = number(lineno, col, tok, "an entry")?;
            if v == 0 || v > m {
                return Err(Error::parse(
                    lineno,
                    col,
                    format!("entry {v} outside 1..={m}"),
                ));
            }
            entries.push(v as u32);
        }
        if count < n {
            return Err(Error::parse(
                lineno,
                line.len() + 1,
                format!("row has {count} entries, expected {n}"),
            ));
        }
        seen += 1;
    }
    if seen < rows {
        return Err(Error::parse(
            text.split('\n').count(),
            1,
            format!("header declares {rows} rows but the file has {seen}"),
        ));
    }
    Ok((spec, HashMatrix::new(rows, n, m, entries)?))
}
