use std::fmt;
use std::str::FromStr;

use super::fmt::format_general;
use crate::error::{Error, Result};

/// Square matrix of finite nonnegative reals, row-major.
///
/// Text form: one row per line, whitespace-separated decimals. Output uses
/// 17 significant digits so every `f64` survives a round trip.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("matrix dimension must be positive".into()));
        }
        if entries.len() != n * n {
            return Err(Error::Shape(format!(
                "{} entries do not form a {n}x{n} matrix",
                entries.len()
            )));
        }
        if let Some((k, x)) = entries
            .iter()
            .enumerate()
            .find(|(_, x)| !(x.is_finite() && **x >= 0.0))
        {
            return Err(Error::Argument(format!(
                "entry ({}, {}) = {x} is not a finite nonnegative real",
                k / n,
                k % n
            )));
        }
        Ok(DenseMatrix { n, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != n) {
            return Err(Error::Shape(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        Self::new(n, rows.concat())
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        DenseMatrix {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn filled(n: usize, value: f64) -> Self {
        let mut m = Self::zeros(n);
        m.entries.fill(value);
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = 1.0;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Matrix with rows reordered so that row `k` of the result is row
    /// `order[k]` of `self`.
    pub fn permute_rows(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.n);
        let entries = order
            .iter()
            .flat_map(|&i| self.row(i).iter().copied())
            .collect();
        DenseMatrix { n: self.n, entries }
    }

    /// Row `i` multiplied by a finite nonnegative `c`.
    pub fn scale_row(&self, i: usize, c: f64) -> Self {
        assert!(c.is_finite() && c >= 0.0);
        let mut m = self.clone();
        for x in &mut m.entries[i * self.n..(i + 1) * self.n] {
            *x *= c;
        }
        m
    }

    /// Number of nonzero entries in each row.
    pub fn row_support_sizes(&self) -> Vec<usize> {
        (0..self.n)
            .map(|i| self.row(i).iter().filter(|&&x| x != 0.0).count())
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let line: Vec<String> = self.row(i).iter().map(|&x| format_general(x, 17)).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl FromStr for DenseMatrix {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    let x: f64 = tok.parse().map_err(|_| {
                        Error::Parse(format!("line {}: {tok:?} is not a number", lineno + 1))
                    })?;
                    if !x.is_finite() || x < 0.0 {
                        return Err(Error::Parse(format!(
                            "line {}: {tok:?} is not a finite nonnegative number",
                            lineno + 1
                        )));
                    }
                    Ok(x)
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Shape("no matrix rows found".into()));
        }
        Self::from_rows(&rows)
    }
}

impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses the plain-text matrix format.
pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    text.parse()
}
