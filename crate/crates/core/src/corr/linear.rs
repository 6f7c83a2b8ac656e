//! Linear baselines: RV coefficient and first canonical correlation.
//!
//! Both are evaluated in sample space through centered Gram matrices
//! `K = Xc·Xcᵀ`, which keeps the cost at `O(m³)` when the feature dimension
//! exceeds the sample count (the usual case for adjacency rows).

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use super::{
    center_matrix, check_paired, CorrelationKind, CorrelationValue, SampleMatrix, DEGENERATE_EPS,
};
use crate::error::Result;

/// Relative ridge added to covariance blocks in CCA.
pub const CCA_RIDGE: f64 = 1e-8;

/// Column-centered copy of the samples, `m × d`.
pub fn centered_columns(x: &SampleMatrix) -> DMatrix<f64> {
    let mut c = DMatrix::from_row_slice(x.rows(), x.cols(), x.as_slice());
    for mut column in c.column_iter_mut() {
        let mean = column.mean();
        column.add_scalar_mut(-mean);
    }
    c
}

pub fn centered_gram(x: &SampleMatrix) -> DMatrix<f64> {
    let c = centered_columns(x);
    &c * c.transpose()
}

/// Centered Gram matrix recovered from squared Euclidean distances,
/// `K = −½·H·D²·H`.
pub fn gram_from_sq_distances(sq: &DMatrix<f64>) -> DMatrix<f64> {
    center_matrix(sq) * -0.5
}

/// One-hot encoding with classes in ascending order.
pub fn one_hot(labels: &[f64]) -> Result<SampleMatrix> {
    let mut classes = labels.to_vec();
    classes.sort_by(f64::total_cmp);
    classes.dedup();
    let mut data = Vec::with_capacity(labels.len() * classes.len());
    for y in labels {
        data.extend(classes.iter().map(|c| f64::from(u8::from(c == y))));
    }
    SampleMatrix::new(labels.len(), classes.len(), data)
}

pub fn rv_coefficient(x: &SampleMatrix, y: &SampleMatrix) -> Result<CorrelationValue> {
    check_paired(x.rows(), y.rows())?;
    let value = rv_from_grams(&centered_gram(x), &centered_gram(y));
    Ok(CorrelationValue::new(CorrelationKind::Rv, value))
}

/// `tr(Kx·Ky) / √(tr(Kx²)·tr(Ky²))`, which equals
/// `tr(Sxy·Syx) / √(tr(Sxx²)·tr(Syy²))`.
pub fn rv_from_grams(kx: &DMatrix<f64>, ky: &DMatrix<f64>) -> f64 {
    let xy = kx.dot(ky);
    let xx = kx.dot(kx);
    let yy = ky.dot(ky);
    if xx <= DEGENERATE_EPS || yy <= DEGENERATE_EPS {
        return 0.0;
    }
    super::clamp_unit(xy / (xx * yy).sqrt())
}

pub fn cca_corr(x: &SampleMatrix, y: &SampleMatrix) -> Result<CorrelationValue> {
    check_paired(x.rows(), y.rows())?;
    let value = cca_from_gram(&centered_gram(x), x.cols(), &centered_columns(y));
    Ok(CorrelationValue::new(CorrelationKind::Cca, value))
}

/// First canonical correlation between features with centered Gram `kx`
/// (feature dimension `dim`) and centered responses `yc` (`m × q`).
///
/// Computes the top eigenvalue of `(Syy+λy)⁻¹·Syx·(Sxx+λx)⁻¹·Sxy` using the
/// identity `(Sxx+λ)⁻¹·Xcᵀ = Xcᵀ·(Kx/m+λ)⁻¹`, with `λx = 1e-8·tr(Sxx)/dim`
/// and `λy = 1e-8·tr(Syy)/q`.
pub fn cca_from_gram(kx: &DMatrix<f64>, dim: usize, yc: &DMatrix<f64>) -> f64 {
    let m = kx.nrows() as f64;
    let q = yc.ncols();
    let trace_sxx = kx.trace() / m;
    let syy = yc.transpose() * yc / m;
    let trace_syy = syy.trace();
    if dim == 0 || q == 0 || trace_sxx <= DEGENERATE_EPS || trace_syy <= DEGENERATE_EPS {
        return 0.0;
    }
    let lambda_x = CCA_RIDGE * trace_sxx / dim as f64;
    let lambda_y = CCA_RIDGE * trace_syy / q as f64;

    let mut reg = kx / m;
    for i in 0..reg.nrows() {
        reg[(i, i)] += lambda_x;
    }
    let Some(solved) = solve_spd(reg, yc) else {
        return 0.0;
    };
    // Syx (Sxx+λ)⁻¹ Sxy, symmetrized against rounding.
    let mid = yc.transpose() * kx * solved / (m * m);
    let mid = (&mid + mid.transpose()) * 0.5;

    let mut syy_reg = syy;
    for i in 0..q {
        syy_reg[(i, i)] += lambda_y;
    }
    let Some(chol) = Cholesky::new(syy_reg) else {
        return 0.0;
    };
    let l_inv = match chol.l().try_inverse() {
        Some(inv) => inv,
        None => return 0.0,
    };
    let whitened = &l_inv * mid * l_inv.transpose();
    let whitened = (&whitened + whitened.transpose()) * 0.5;
    let top = SymmetricEigen::new(whitened)
        .eigenvalues
        .iter()
        .copied()
        .fold(0.0f64, f64::max);
    super::clamp_unit(top.max(0.0).sqrt())
}

fn solve_spd(a: DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    match Cholesky::new(a.clone()) {
        Some(chol) => Some(chol.solve(b)),
        None => a.lu().solve(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[f64]) -> SampleMatrix {
        SampleMatrix::from_column(v).unwrap()
    }

    #[test]
    fn rv_of_identical_matrices_is_one() {
        let x = SampleMatrix::from_rows(&[
            vec![0.0, 1.0],
            vec![2.0, -1.0],
            vec![0.5, 0.5],
            vec![3.0, 3.0],
        ])
        .unwrap();
        let r = rv_coefficient(&x, &x).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rv_of_constant_is_zero() {
        let x = col(&[0.0, 1.0, 2.0, 5.0]);
        let y = col(&[2.0; 4]);
        assert_eq!(rv_coefficient(&x, &y).unwrap().value, 0.0);
    }

    #[test]
    fn cca_perfect_linear() {
        let xs = [0.2, 1.5, -0.3, 2.8, 0.9, 4.4];
        let ys: Vec<f64> = xs.iter().map(|v| 2.0 * v + 1.0).collect();
        let r = cca_corr(&col(&xs), &col(&ys)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn cca_tolerates_duplicate_columns() {
        let x = SampleMatrix::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.5, 0.5],
            vec![3.0, 3.0],
            vec![-1.0, -1.0],
        ])
        .unwrap();
        let y = col(&[0.1, 0.9, 0.4, 3.2, -0.8]);
        let r = cca_corr(&x, &y).unwrap();
        assert!(r.value.is_finite() && (0.0..=1.0).contains(&r.value));
        assert!(r.value > 0.9);
    }

    #[test]
    fn one_hot_orders_classes() {
        let h = one_hot(&[2.0, 0.0, 2.0]).unwrap();
        assert_eq!(h.cols(), 2);
        assert_eq!(h.row(0), &[0.0, 1.0]);
        assert_eq!(h.row(1), &[1.0, 0.0]);
    }

    #[test]
    fn gram_from_distances_matches_direct() {
        let x = SampleMatrix::from_rows(&[
            vec![0.0, 1.0, 1.0],
            vec![2.0, -1.0, 0.0],
            vec![0.5, 0.5, 4.0],
            vec![3.0, 3.0, 1.0],
        ])
        .unwrap();
        let d = crate::corr::pairwise_distances(&x, crate::corr::Metric::Euclidean).unwrap();
        let sq = d.as_matrix().map(|v| v * v);
        let diff = gram_from_sq_distances(&sq) - centered_gram(&x);
        assert!(diff.amax() < 1e-10);
    }
}
