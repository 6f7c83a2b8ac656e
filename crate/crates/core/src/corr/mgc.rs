//! Multiscale generalized correlation.
//!
//! Local distance correlations are computed at every pair of neighbourhood
//! scales `(k, l)`: an entry `(i, j)` contributes at scale `k` when `i` is
//! among the `k` nearest neighbours of `j` in X, and at scale `l` when `j` is
//! among the `l` nearest neighbours of `i` in Y. Tied distances share a scale
//! index, so a binary label only has two Y scales. The reported statistic is
//! the largest local correlation inside the largest connected region of
//! scales that beat the global statistic; without a region covering more
//! than `0.02·m²` cells the global statistic (plain distance correlation) is
//! returned.

use nalgebra::DMatrix;

use super::{
    check_paired, dcorr_centered, double_center, pairwise_distances, CorrelationKind,
    CorrelationValue, DistanceMatrix, Metric, SampleMatrix, DEGENERATE_EPS,
};
use crate::error::{Error, Result};

/// Fraction of the `m × m` scale grid a significant region must exceed.
pub const REGION_FRACTION: f64 = 0.02;

/// One side of an MGC computation: centered distances plus per-column
/// neighbour ranks.
#[derive(Debug, Clone)]
pub struct MgcSide {
    centered: DMatrix<f64>,
    /// 0-based scale index of entry `(i, j)` within column `j`, column-major.
    ranks: Vec<u32>,
    scales: usize,
}

impl MgcSide {
    pub fn new(d: &DistanceMatrix) -> Self {
        let m = d.size();
        let mut ranks = vec![0u32; m * m];
        let mut scales = 0usize;
        let mut order: Vec<usize> = (0..m).collect();
        for j in 0..m {
            let col = d.as_matrix().column(j);
            order.sort_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
            let mut rank = 0u32;
            for w in 0..m {
                if w > 0 && col[order[w]] != col[order[w - 1]] {
                    rank += 1;
                }
                ranks[j * m + order[w]] = rank;
            }
            scales = scales.max(rank as usize + 1);
        }
        MgcSide {
            centered: double_center(d),
            ranks,
            scales,
        }
    }

    pub fn size(&self) -> usize {
        self.centered.nrows()
    }

    pub fn centered(&self) -> &DMatrix<f64> {
        &self.centered
    }

    /// Number of distinct neighbourhood scales.
    pub fn scales(&self) -> usize {
        self.scales
    }

    fn rank(&self, i: usize, j: usize) -> usize {
        self.ranks[j * self.size() + i] as usize
    }
}

pub fn mgc(
    x: &SampleMatrix,
    x_metric: Metric,
    y: &SampleMatrix,
    y_metric: Metric,
) -> Result<CorrelationValue> {
    check_paired(x.rows(), y.rows())?;
    let dx = pairwise_distances(x, x_metric)?;
    let dy = pairwise_distances(y, y_metric)?;
    mgc_from_distances(&dx, &dy)
}

pub fn mgc_from_distances(dx: &DistanceMatrix, dy: &DistanceMatrix) -> Result<CorrelationValue> {
    check_paired(dx.size(), dy.size())?;
    mgc_sides(&MgcSide::new(dx), &MgcSide::new(dy))
}

/// MGC between two prepared sides.
pub fn mgc_sides(x: &MgcSide, y: &MgcSide) -> Result<CorrelationValue> {
    let m = x.size();
    check_paired(m, y.size())?;
    if m < 4 {
        return Err(Error::invalid(format!(
            "mgc needs at least 4 samples, got {m}"
        )));
    }
    let global = dcorr_centered(x.centered(), y.centered());
    let local = local_correlations(x, y);
    let (kx, ly) = (x.scales(), y.scales());

    let mut best = CorrelationValue {
        value: global,
        kind: CorrelationKind::Mgc,
        scale: Some((kx, ly)),
    };
    let region = largest_region(&local, kx, ly, global);
    if region.len() as f64 > REGION_FRACTION * (m * m) as f64 {
        for idx in region {
            let v = local[idx];
            if v > best.value {
                best.value = v;
                best.scale = Some((idx / ly + 1, idx % ly + 1));
            }
        }
    }
    best.value = super::clamp_unit(best.value);
    Ok(best)
}

/// Row-major `kx × ly` grid of local correlations.
fn local_correlations(x: &MgcSide, y: &MgcSide) -> Vec<f64> {
    let m = x.size();
    let (kx, ly) = (x.scales(), y.scales());
    let mut cross = vec![0.0; kx * ly];
    let mut sum_x = vec![0.0; kx];
    let mut sq_x = vec![0.0; kx];
    let mut sum_y = vec![0.0; ly];
    let mut sq_y = vec![0.0; ly];
    let (cx, cy) = (x.centered(), y.centered());
    for j in 0..m {
        for i in 0..m {
            let a = cx[(i, j)];
            let b = cy[(i, j)];
            let k = x.rank(i, j);
            let l = y.rank(j, i);
            cross[k * ly + l] += a * b;
            sum_x[k] += a;
            sq_x[k] += a * a;
            sum_y[l] += b;
            sq_y[l] += b * b;
        }
    }
    cumulative(&mut sum_x);
    cumulative(&mut sq_x);
    cumulative(&mut sum_y);
    cumulative(&mut sq_y);
    for k in 0..kx {
        for l in 1..ly {
            cross[k * ly + l] += cross[k * ly + l - 1];
        }
    }
    for k in 1..kx {
        for l in 0..ly {
            cross[k * ly + l] += cross[(k - 1) * ly + l];
        }
    }

    let n2 = (m * m) as f64;
    let var_x: Vec<f64> = (0..kx)
        .map(|k| sq_x[k] - sum_x[k] * sum_x[k] / n2)
        .collect();
    let var_y: Vec<f64> = (0..ly)
        .map(|l| sq_y[l] - sum_y[l] * sum_y[l] / n2)
        .collect();
    let mut out = vec![0.0; kx * ly];
    for k in 0..kx {
        for l in 0..ly {
            let denom = var_x[k] * var_y[l];
            if var_x[k] <= DEGENERATE_EPS || var_y[l] <= DEGENERATE_EPS {
                continue;
            }
            let cov = cross[k * ly + l] - sum_x[k] * sum_y[l] / n2;
            out[k * ly + l] = cov / denom.sqrt();
        }
    }
    out
}

fn cumulative(v: &mut [f64]) {
    for i in 1..v.len() {
        v[i] += v[i - 1];
    }
}

/// Cells of the largest 4-connected component with value above `threshold`.
/// Ties between equal-size components go to the one found first in
/// row-major order.
fn largest_region(grid: &[f64], rows: usize, cols: usize, threshold: f64) -> Vec<usize> {
    let mut seen = vec![false; grid.len()];
    let mut best: Vec<usize> = Vec::new();
    let mut stack = Vec::new();
    for start in 0..grid.len() {
        if seen[start] || grid[start] <= threshold {
            continue;
        }
        let mut component = Vec::new();
        seen[start] = true;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            component.push(idx);
            let (r, c) = (idx / cols, idx % cols);
            let mut visit = |nr: usize, nc: usize| {
                let n = nr * cols + nc;
                if !seen[n] && grid[n] > threshold {
                    seen[n] = true;
                    stack.push(n);
                }
            };
            if r > 0 {
                visit(r - 1, c);
            }
            if r + 1 < rows {
                visit(r + 1, c);
            }
            if c > 0 {
                visit(r, c - 1);
            }
            if c + 1 < cols {
                visit(r, c + 1);
            }
        }
        if component.len() > best.len() {
            best = component;
        }
    }
    best
}
