//! Squared Euclidean distances between graphs, per vertex row and per
//! induced subgraph.
//!
//! Binary graphs are packed into bit rows so a row distance is a masked XOR
//! popcount; weighted graphs fall back to dense rows. Both layouts store the
//! rows of one vertex across all graphs contiguously.

use nalgebra::DMatrix;

use crate::graph::{LabeledGraphDataset, VertexSet};

#[derive(Debug, Clone)]
enum Rows {
    Bits { words: usize, data: Vec<u64> },
    Dense { data: Vec<f64> },
}

/// Row-major bit mask selecting a vertex set.
#[derive(Debug, Clone)]
pub(crate) struct Mask(Vec<u64>);

#[derive(Debug, Clone)]
pub(crate) struct FeatureKernel {
    m: usize,
    n: usize,
    directed: bool,
    rows: Rows,
}

impl FeatureKernel {
    pub fn new(ds: &LabeledGraphDataset) -> Self {
        Self::packed(ds).unwrap_or_else(|| Self::build(ds))
    }

    /// Bit-packed layout, or `None` if some weight is neither 0 nor 1.
    fn packed(ds: &LabeledGraphDataset) -> Option<Self> {
        let (m, n) = (ds.len(), ds.n());
        let words = n.div_ceil(64);
        let mut data = vec![0u64; n * m * words];
        let mut binary = true;
        for (i, g) in ds.graphs().iter().enumerate() {
            for u in 0..n {
                let base = (u * m + i) * words;
                for (word, chunk) in data[base..base + words].iter_mut().zip(g.row(u).chunks(64)) {
                    *word = chunk.iter().enumerate().fold(0u64, |acc, (b, &w)| {
                        binary &= w == 0.0 || w == 1.0;
                        acc | (u64::from(w != 0.0) << b)
                    });
                }
            }
            if !binary {
                return None;
            }
        }
        Some(FeatureKernel {
            m,
            n,
            directed: ds.is_directed(),
            rows: Rows::Bits { words, data },
        })
    }

    /// Dense layout regardless of the entries; used to cross-check the
    /// bit-packed path.
    #[cfg(test)]
    pub fn dense(ds: &LabeledGraphDataset) -> Self {
        Self::build(ds)
    }

    fn build(ds: &LabeledGraphDataset) -> Self {
        let (m, n) = (ds.len(), ds.n());
        let mut data = vec![0.0; n * m * n];
        for (i, g) in ds.graphs().iter().enumerate() {
            for u in 0..n {
                let base = (u * m + i) * n;
                data[base..base + n].copy_from_slice(g.row(u));
            }
        }
        FeatureKernel {
            m,
            n,
            directed: ds.is_directed(),
            rows: Rows::Dense { data },
        }
    }

    pub fn mask(&self, set: &VertexSet) -> Mask {
        let mut bits = vec![0u64; self.n.div_ceil(64)];
        for &v in set {
            bits[v / 64] |= 1u64 << (v % 64);
        }
        Mask(bits)
    }

    /// Feature dimension of a whole-subgraph sample on `k` vertices.
    pub fn subgraph_dim(&self, k: usize) -> usize {
        let pairs = k * k.saturating_sub(1);
        if self.directed {
            pairs
        } else {
            pairs / 2
        }
    }

    /// `D²[i,j] = Σ_{v∈set} (A_i[u,v] − A_j[u,v])²`.
    pub fn vertex_sq_distances(&self, u: usize, set: &VertexSet, mask: &Mask) -> PairDistances {
        let m = self.m;
        let mut tri = Vec::with_capacity(m * m.saturating_sub(1) / 2);
        match &self.rows {
            Rows::Bits { words, data } => {
                let block = &data[u * m * words..(u + 1) * m * words];
                hamming_pairs(block, *words, &mask.0, &mut tri);
            }
            Rows::Dense { data } => {
                let n = self.n;
                let block = &data[u * m * n..(u + 1) * m * n];
                for i in 0..m {
                    let ri = &block[i * n..(i + 1) * n];
                    for j in (i + 1)..m {
                        let rj = &block[j * n..(j + 1) * n];
                        tri.push(set.iter().map(|&v| (ri[v] - rj[v]).powi(2)).sum());
                    }
                }
            }
        }
        PairDistances { m, tri }
    }

    /// Squared distances between the flattened induced subgraphs `A_i[set]`
    /// (upper triangle for undirected graphs, all off-diagonal entries for
    /// directed ones).
    pub fn subgraph_sq_distances(&self, set: &VertexSet, mask: &Mask) -> PairDistances {
        let mut total = PairDistances {
            m: self.m,
            tri: vec![0.0; self.m * self.m.saturating_sub(1) / 2],
        };
        // Row sums visit every pair twice for undirected graphs. Sums are in
        // vertex order, so the result does not depend on scheduling.
        for &u in set {
            let d = self.vertex_sq_distances(u, set, mask);
            total.tri.iter_mut().zip(&d.tri).for_each(|(t, v)| *t += v);
        }
        if !self.directed {
            total.tri.iter_mut().for_each(|t| *t *= 0.5);
        }
        total
    }
}

#[inline(always)]
fn hamming_pairs_generic(block: &[u64], words: usize, mask: &[u64], out: &mut Vec<f64>) {
    let m = block.len() / words;
    for i in 0..m {
        let ri = &block[i * words..(i + 1) * words];
        for j in (i + 1)..m {
            let rj = &block[j * words..(j + 1) * words];
            let count: u32 = ri
                .iter()
                .zip(rj)
                .zip(mask)
                .map(|((a, b), k)| ((a ^ b) & k).count_ones())
                .sum();
            out.push(f64::from(count));
        }
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn hamming_pairs_popcnt(block: &[u64], words: usize, mask: &[u64], out: &mut Vec<f64>) {
    hamming_pairs_generic(block, words, mask, out)
}

/// Masked Hamming distances between all row pairs of `block`, appended in
/// upper-triangle order.
fn hamming_pairs(block: &[u64], words: usize, mask: &[u64], out: &mut Vec<f64>) {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("popcnt") {
        // SAFETY: the CPU supports the enabled feature.
        return unsafe { hamming_pairs_popcnt(block, words, mask, out) };
    }
    hamming_pairs_generic(block, words, mask, out)
}

/// Symmetric pairwise values with a zero diagonal, stored as the row-major
/// strict upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PairDistances {
    m: usize,
    tri: Vec<f64>,
}

impl PairDistances {
    #[cfg(test)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        if i == j {
            return 0.0;
        }
        self.tri[i * (2 * self.m - i - 1) / 2 + (j - i - 1)]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.m, self.m);
        let mut k = 0;
        for i in 0..self.m {
            for j in (i + 1)..self.m {
                out[(i, j)] = self.tri[k];
                out[(j, i)] = self.tri[k];
                k += 1;
            }
        }
        out
    }

    /// With `X = f(D)` entrywise (`f(0) = 0`) and `C` double-centered (given
    /// by its strict upper triangle), returns `(Σ X∘C, Σ (HXH)²)` over all entries.
    ///
    /// Double-centering `X` is unnecessary for the inner product because `C`
    /// has zero row sums, and `‖HXH‖² = ‖X‖² − 2m·Σr² + m²·ḡ²` with row means
    /// `r` and grand mean `ḡ`.
    pub fn centered_moments(&self, f: impl Fn(f64) -> f64, centered: &[f64]) -> (f64, f64) {
        let m = self.m;
        let mut rows = vec![0.0; m];
        let (mut cross, mut ss) = (0.0, 0.0);
        let mut k = 0;
        for i in 0..m {
            let (head, tail) = rows.split_at_mut(i + 1);
            let len = tail.len();
            let mut row_i = 0.0;
            for (row_j, (&d, &c)) in tail
                .iter_mut()
                .zip(self.tri[k..k + len].iter().zip(&centered[k..k + len]))
            {
                let x = f(d);
                cross += x * c;
                ss += x * x;
                row_i += x;
                *row_j += x;
            }
            head[i] += row_i;
            k += len;
        }
        let inv = 1.0 / m as f64;
        let grand = rows.iter().sum::<f64>() * inv * inv;
        let row_ss: f64 = rows.iter().map(|r| (r * inv).powi(2)).sum();
        let mf = m as f64;
        let norm = 2.0 * ss - 2.0 * mf * row_ss + mf * mf * grand * grand;
        (2.0 * cross, norm.max(0.0))
    }
}

/// Strict upper triangle of a square matrix, row-major.
pub(crate) fn upper_triangle(a: &DMatrix<f64>) -> Vec<f64> {
    let m = a.nrows();
    (0..m)
        .flat_map(|i| ((i + 1)..m).map(move |j| a[(i, j)]))
        .collect()
}
