//! The `gso v1` text format: the node count on the first line, then `n` rows
//! of `n` whitespace-separated floats holding the GSO.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::Graph;
use crate::error::{Error, Result};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_gso(g: &Graph) -> String {
    let n = g.n();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| fmt_f64(g.gso()[(i, j)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Parses a `gso v1` document into a square matrix (not symmetrized).
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty gso file".into()))?;
    let n: usize = header
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line 1: expected node count, got {header:?}")))?;
    if n == 0 {
        return Err(Error::Parse("line 1: node count must be positive".into()));
    }
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("expected {n} matrix rows, found {i}")))?;
        let row: Vec<&str> = line.split_whitespace().collect();
        if row.len() != n {
            return Err(Error::Parse(format!("line {}: expected {n} values, found {}", i + 2, row.len())));
        }
        for (j, tok) in row.iter().enumerate() {
            m[(i, j)] = tok
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad float {tok:?}", i + 2)))?;
        }
    }
    if lines.next().is_some() {
        return Err(Error::Parse(format!("trailing data after {n} rows")));
    }
    Ok(m)
}

pub fn parse_gso(text: &str) -> Result<Graph> {
    Graph::from_gso(parse_matrix(text)?)
}

pub fn read_gso(path: impl AsRef<Path>) -> Result<Graph> {
    parse_gso(&std::fs::read_to_string(path)?)
}

pub fn save_gso(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_gso(g))?;
    Ok(())
}
