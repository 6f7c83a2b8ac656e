use nalgebra::DMatrix;

use super::{
    check_paired, double_center, pairwise_distances, CorrelationKind, CorrelationValue,
    DistanceMatrix, Metric, SampleMatrix, DEGENERATE_EPS,
};
use crate::error::Result;

/// Squared sample distance covariance (V-statistic):
/// `(1/m²) Σᵢⱼ Cx[i,j]·Cy[i,j]` over double-centered distance matrices.
pub fn dcov_sq(
    x: &SampleMatrix,
    x_metric: Metric,
    y: &SampleMatrix,
    y_metric: Metric,
) -> Result<f64> {
    check_paired(x.rows(), y.rows())?;
    let cx = double_center(&pairwise_distances(x, x_metric)?);
    let cy = double_center(&pairwise_distances(y, y_metric)?);
    Ok(dcov_sq_centered(&cx, &cy))
}

/// Hadamard-product mean of two centered matrices, clamped at zero.
///
/// The sum is accumulated row by row in index order; `dcov_sq_centered(a, b)`
/// and `dcov_sq_centered(b, a)` therefore perform the same multiplications in
/// the same order and agree bit for bit.
pub fn dcov_sq_centered(cx: &DMatrix<f64>, cy: &DMatrix<f64>) -> f64 {
    let m = cx.nrows();
    let sum: f64 = cx
        .as_slice()
        .iter()
        .zip(cy.as_slice())
        .map(|(a, b)| a * b)
        .sum();
    (sum / (m * m) as f64).max(0.0)
}

pub fn dcorr(
    x: &SampleMatrix,
    x_metric: Metric,
    y: &SampleMatrix,
    y_metric: Metric,
) -> Result<CorrelationValue> {
    check_paired(x.rows(), y.rows())?;
    let dx = pairwise_distances(x, x_metric)?;
    let dy = pairwise_distances(y, y_metric)?;
    dcorr_from_distances(&dx, &dy)
}

pub fn dcorr_from_distances(dx: &DistanceMatrix, dy: &DistanceMatrix) -> Result<CorrelationValue> {
    check_paired(dx.size(), dy.size())?;
    let cx = double_center(dx);
    let cy = double_center(dy);
    Ok(CorrelationValue::new(
        CorrelationKind::Dcorr,
        dcorr_centered(&cx, &cy),
    ))
}

/// Distance correlation from centered matrices; 0 when either side is
/// degenerate.
pub fn dcorr_centered(cx: &DMatrix<f64>, cy: &DMatrix<f64>) -> f64 {
    let xx = dcov_sq_centered(cx, cx);
    let yy = dcov_sq_centered(cy, cy);
    if xx <= DEGENERATE_EPS || yy <= DEGENERATE_EPS {
        return 0.0;
    }
    super::clamp_unit(dcov_sq_centered(cx, cy) / (xx * yy).sqrt())
}
