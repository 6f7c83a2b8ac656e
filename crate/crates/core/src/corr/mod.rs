//! Dependence statistics between paired samples.
//!
//! All statistics are computed from pairwise distance matrices (or the centered
//! Gram matrices derived from them), so the screening code can feed in
//! distances it computed through a faster kernel and get identical results.

mod dcorr;
mod distance;
mod linear;
mod mgc;

pub use dcorr::{dcorr, dcorr_centered, dcorr_from_distances, dcov_sq, dcov_sq_centered};
pub use distance::{center_matrix, double_center, pairwise_distances, DistanceMatrix, Metric};
pub use linear::{
    cca_corr, cca_from_gram, centered_columns, centered_gram, gram_from_sq_distances, one_hot,
    rv_coefficient, rv_from_grams,
};
pub use mgc::{mgc, mgc_from_distances, mgc_sides, MgcSide, REGION_FRACTION};

use crate::error::{Error, Result};

/// Denominators at or below this are treated as a degenerate (constant) sample.
pub const DEGENERATE_EPS: f64 = 1e-14;

/// Real-valued samples, one row per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl SampleMatrix {
    /// Builds a matrix from row-major data. Requires at least two rows and
    /// finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 samples, got {rows}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite entry at sample {}, column {}",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(SampleMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// A single-column matrix, e.g. a label vector.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::new(values.len(), 1, values.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Appends the columns of `other` to the right of `self`.
    pub fn hstack(&self, other: &SampleMatrix) -> Result<SampleMatrix> {
        check_paired(self.rows, other.rows)?;
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        SampleMatrix::new(self.rows, cols, data)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelationKind {
    Dcorr,
    Mgc,
    Rv,
    Cca,
}

/// A dependence statistic value, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationValue {
    pub value: f64,
    pub kind: CorrelationKind,
    /// Optimal neighbourhood scale `(k, l)` for MGC, 1-based.
    pub scale: Option<(usize, usize)>,
}

impl CorrelationValue {
    pub(crate) fn new(kind: CorrelationKind, value: f64) -> Self {
        CorrelationValue {
            value: clamp_unit(value),
            kind,
            scale: None,
        }
    }
}

pub(crate) fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

pub(crate) fn check_paired(m_x: usize, m_y: usize) -> Result<()> {
    if m_x != m_y {
        return Err(Error::invalid(format!(
            "sample counts differ: {m_x} vs {m_y}"
        )));
    }
    if m_x < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 samples, got {m_x}"
        )));
    }
    Ok(())
}
