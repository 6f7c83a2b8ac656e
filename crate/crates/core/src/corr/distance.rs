use nalgebra::DMatrix;

use super::SampleMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Metric {
    /// `‖x − x'‖₂`
    #[default]
    Euclidean,
    /// `1{y ≠ y'}`, for categorical label vectors.
    Discrete,
}

/// Symmetric, zero-diagonal, nonnegative pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    matrix: DMatrix<f64>,
    metric: Metric,
}

impl DistanceMatrix {
    /// Wraps a precomputed matrix after checking the metric axioms the
    /// statistics rely on.
    pub fn new(matrix: DMatrix<f64>, metric: Metric) -> Result<Self> {
        let m = matrix.nrows();
        if matrix.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: matrix.ncols(),
            });
        }
        if m < 2 {
            return Err(Error::invalid("distance matrix needs at least 2 samples"));
        }
        for i in 0..m {
            if matrix[(i, i)] != 0.0 {
                return Err(Error::invalid(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                let d = matrix[(i, j)];
                if !d.is_finite() || d < 0.0 || d != matrix[(j, i)] {
                    return Err(Error::invalid(format!(
                        "entry ({i}, {j}) is not a valid symmetric distance"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { matrix, metric })
    }

    /// Euclidean distances from a matrix of squared Euclidean distances.
    /// The input is trusted to be symmetric with a zero diagonal.
    pub fn from_squared_euclidean(sq: &DMatrix<f64>) -> Self {
        DistanceMatrix {
            matrix: sq.map(|v| v.max(0.0).sqrt()),
            metric: Metric::Euclidean,
        }
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }
}

pub fn pairwise_distances(samples: &SampleMatrix, metric: Metric) -> Result<DistanceMatrix> {
    let m = samples.rows();
    if metric == Metric::Discrete && samples.cols() != 1 {
        return Err(Error::invalid(
            "discrete metric applies to label vectors (one column) only",
        ));
    }
    let mut d = DMatrix::zeros(m, m);
    for i in 0..m {
        let xi = samples.row(i);
        for j in 0..i {
            let xj = samples.row(j);
            let v = match metric {
                Metric::Euclidean => xi
                    .iter()
                    .zip(xj)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt(),
                Metric::Discrete => f64::from(u8::from(xi[0] != xj[0])),
            };
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    Ok(DistanceMatrix { matrix: d, metric })
}

/// `C[i,j] = D[i,j] − rowmean_i − colmean_j + grandmean`.
pub fn double_center(d: &DistanceMatrix) -> DMatrix<f64> {
    center_matrix(d.as_matrix())
}

/// Double-centering of an arbitrary square matrix.
pub fn center_matrix(d: &DMatrix<f64>) -> DMatrix<f64> {
    let m = d.nrows();
    let inv = 1.0 / m as f64;
    let row_means: Vec<f64> = (0..m).map(|i| d.row(i).sum() * inv).collect();
    let col_means: Vec<f64> = (0..m).map(|j| d.column(j).sum() * inv).collect();
    let grand = row_means.iter().sum::<f64>() * inv;
    DMatrix::from_fn(m, m, |i, j| d[(i, j)] - row_means[i] - col_means[j] + grand)
}
