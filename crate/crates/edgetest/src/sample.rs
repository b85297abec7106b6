//! Row-major sample matrix with validated shape.

use crate::error::{Error, Result};

/// An `n × p` data matrix: rows are observations, columns are variates.
///
/// All entries must be finite and `n ≥ 2`, `p ≥ 2` (the order-2
/// U-statistic needs two samples, and a graph needs two vertices).
#[derive(Debug, Clone)]
pub struct SampleMatrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
}

impl SampleMatrix {
    /// Builds a sample matrix from row-major values of length `n * p`.
    pub fn new(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if n < 2 {
            return Err(Error::InsufficientData { n, required: 2 });
        }
        if p < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 variates, got {p}"
            )));
        }
        if values.len() != n * p {
            return Err(Error::InvalidConfig(format!(
                "value buffer has length {}, expected n*p = {}",
                values.len(),
                n * p
            )));
        }
        for (pos, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: pos / p,
                    col: pos % p,
                });
            }
        }
        Ok(Self { n, p, values })
    }

    /// Builds from an iterator of rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let p = rows[0].as_ref().len();
        let mut values = Vec::with_capacity(n * p);
        for row in rows {
            let row = row.as_ref();
            if row.len() != p {
                return Err(Error::InvalidConfig(format!(
                    "ragged rows: expected {p} columns, got {}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Self::new(n, p, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, q: usize) -> &[f64] {
        &self.values[q * self.p..(q + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.p)
    }

    /// Keeps only the first `n` rows. Handy for nested sample-size sweeps.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n > self.n {
            return Err(Error::InvalidConfig(format!(
                "cannot truncate {} rows to {n}",
                self.n
            )));
        }
        Self::new(n, self.p, self.values[..n * self.p].to_vec())
    }
}
