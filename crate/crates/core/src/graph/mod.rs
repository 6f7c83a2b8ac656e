//! Graph data model: adjacency matrices, edge-probability models, vertex sets
//! and labeled graph populations.

pub(crate) mod io;

pub use io::{read_dataset, write_dataset, GRAPHS_FILE, LABELS_FILE};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Dense `n × n` adjacency matrix without self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    n: usize,
    directed: bool,
    data: Vec<f64>,
}

impl AdjacencyMatrix {
    pub fn new(n: usize, data: Vec<f64>, directed: bool) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        for u in 0..n {
            if data[u * n + u] != 0.0 {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            for v in 0..n {
                let w = data[u * n + v];
                if !w.is_finite() {
                    return Err(Error::invalid(format!("non-finite weight at ({u}, {v})")));
                }
                if !directed && w != data[v * n + u] {
                    return Err(Error::invalid(format!(
                        "undirected graph is asymmetric at ({u}, {v})"
                    )));
                }
            }
        }
        Ok(AdjacencyMatrix { n, directed, data })
    }

    pub fn zeros(n: usize, directed: bool) -> Self {
        AdjacencyMatrix {
            n,
            directed,
            data: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    /// Sets the weight of edge `(u, v)`, mirrored for undirected graphs.
    pub fn set_edge(&mut self, u: usize, v: usize, weight: f64) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::invalid(format!(
                "edge ({u}, {v}) out of range for {} vertices",
                self.n
            )));
        }
        if u == v {
            return Err(Error::invalid(format!("self-loop at vertex {u}")));
        }
        if !weight.is_finite() {
            return Err(Error::invalid(format!("non-finite weight at ({u}, {v})")));
        }
        self.data[u * self.n + v] = weight;
        if !self.directed {
            self.data[v * self.n + u] = weight;
        }
        Ok(())
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.data[u * self.n..(u + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Every entry is 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.data.iter().all(|&w| w == 0.0 || w == 1.0)
    }
}

/// Edge probabilities of an inhomogeneous Erdős–Rényi model.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProbabilityMatrix {
    n: usize,
    data: Vec<f64>,
}

impl EdgeProbabilityMatrix {
    /// Validates entries in `[0, 1]` and symmetry. The diagonal is ignored
    /// and stored as zero.
    pub fn new(n: usize, mut data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        for u in 0..n {
            data[u * n + u] = 0.0;
            for v in 0..n {
                let p = data[u * n + v];
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::invalid(format!(
                        "edge probability {p} at ({u}, {v}) outside [0, 1]"
                    )));
                }
                if p != data[v * n + u] {
                    return Err(Error::invalid(format!(
                        "edge probabilities asymmetric at ({u}, {v})"
                    )));
                }
            }
        }
        Ok(EdgeProbabilityMatrix { n, data })
    }

    pub fn constant(n: usize, p: f64) -> Result<Self> {
        Self::new(n, vec![p; n * n])
    }

    /// Block model: `within[b]` inside block `b` and `between[a][b]` across.
    /// `sizes` lists the block sizes in vertex order.
    pub fn from_blocks(sizes: &[usize], probs: &[Vec<f64>]) -> Result<Self> {
        let n: usize = sizes.iter().sum();
        let block_of: Vec<usize> = sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
            .collect();
        if probs.len() != sizes.len() || probs.iter().any(|r| r.len() != sizes.len()) {
            return Err(Error::invalid(
                "block probability matrix must be square over blocks",
            ));
        }
        let mut data = vec![0.0; n * n];
        for u in 0..n {
            for v in 0..n {
                data[u * n + v] = probs[block_of[u]][block_of[v]];
            }
        }
        Self::new(n, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Entries moved into `[eps, 1 − eps]`.
    pub fn clamped(&self, eps: f64) -> Self {
        let mut data: Vec<f64> = self.data.iter().map(|p| p.clamp(eps, 1.0 - eps)).collect();
        for u in 0..self.n {
            data[u * self.n + u] = 0.0;
        }
        EdgeProbabilityMatrix { n: self.n, data }
    }

    /// Restriction to the vertices of `set`, in set order.
    pub fn restrict(&self, set: &VertexSet) -> Result<Self> {
        set.check_within(self.n)?;
        let k = set.len();
        let mut data = Vec::with_capacity(k * k);
        for &u in set.iter() {
            data.extend(set.iter().map(|&v| self.get(u, v)));
        }
        Ok(EdgeProbabilityMatrix { n: k, data })
    }
}

/// Strictly increasing list of vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("vertex set must be strictly increasing"));
        }
        Ok(VertexSet(vertices))
    }

    /// Sorts and deduplicates.
    pub fn from_unsorted(mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        VertexSet(vertices)
    }

    pub fn full(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, u: usize) -> bool {
        self.0.binary_search(&u).is_ok()
    }

    /// Position of `u` within the set.
    pub fn position(&self, u: usize) -> Option<usize> {
        self.0.binary_search(&u).ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Maps positions within `self` back to vertex ids, i.e. the composite
    /// selection `self ∘ inner`.
    pub fn compose(&self, inner: &VertexSet) -> Result<VertexSet> {
        inner.check_within(self.len())?;
        Ok(VertexSet(inner.iter().map(|&i| self.0[i]).collect()))
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        self.iter().filter(|&&u| other.contains(u)).count()
    }

    pub(crate) fn check_within(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&last) if last >= n => Err(Error::invalid(format!(
                "vertex {last} out of range for {n} vertices"
            ))),
            _ => Ok(()),
        }
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Draws an undirected graph with independent Bernoulli edges.
pub fn sample_ier(p: &EdgeProbabilityMatrix, seed: u64) -> AdjacencyMatrix {
    sample_ier_with(p, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// As [`sample_ier`], drawing from a caller-supplied generator. Edges are
/// visited in row-major upper-triangle order.
pub fn sample_ier_with<R: Rng + ?Sized>(p: &EdgeProbabilityMatrix, rng: &mut R) -> AdjacencyMatrix {
    let n = p.n();
    let mut a = AdjacencyMatrix::zeros(n, false);
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p.get(u, v) {
                a.data[u * n + v] = 1.0;
                a.data[v * n + u] = 1.0;
            }
        }
    }
    a
}

/// `Σ_{u<v} A·ln P + (1−A)·ln(1−P)`. A zero-probability edge that is present
/// (or a certain edge that is absent) yields `−∞`.
pub fn ier_log_likelihood(a: &AdjacencyMatrix, p: &EdgeProbabilityMatrix) -> Result<f64> {
    if a.n() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: a.n(),
        });
    }
    if a.is_directed() || !a.is_binary() {
        return Err(Error::invalid(
            "IER likelihood requires an undirected binary graph",
        ));
    }
    let n = a.n();
    let mut ll = 0.0;
    for u in 0..n {
        for v in (u + 1)..n {
            let q = p.get(u, v);
            ll += if a.get(u, v) == 1.0 {
                q.ln()
            } else {
                (1.0 - q).ln()
            };
        }
    }
    Ok(ll)
}

/// `A[U, U]` with rows and columns in the set's order.
pub fn induced_subgraph(a: &AdjacencyMatrix, set: &VertexSet) -> Result<AdjacencyMatrix> {
    set.check_within(a.n())?;
    let k = set.len();
    let mut data = Vec::with_capacity(k * k);
    for &u in set {
        let row = a.row(u);
        data.extend(set.iter().map(|&v| row[v]));
    }
    Ok(AdjacencyMatrix {
        n: k,
        directed: a.directed,
        data,
    })
}

/// Row of `u` in the subgraph induced by `restrict` (the zero self entry is
/// kept, so the length is `|restrict|`).
pub fn vertex_feature(a: &AdjacencyMatrix, u: usize, restrict: &VertexSet) -> Result<Vec<f64>> {
    restrict.check_within(a.n())?;
    if !restrict.contains(u) {
        return Err(Error::invalid(format!(
            "vertex {u} not in the restriction set"
        )));
    }
    let row = a.row(u);
    Ok(restrict.iter().map(|&v| row[v]).collect())
}

/// Labeled graphs on a shared vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraphDataset {
    graphs: Vec<AdjacencyMatrix>,
    labels: Vec<f64>,
    graph_ids: Vec<String>,
    subject_ids: Option<Vec<String>>,
    vertex_names: Option<Vec<String>>,
}

impl LabeledGraphDataset {
    pub fn new(graphs: Vec<AdjacencyMatrix>, labels: Vec<f64>) -> Result<Self> {
        let ids = (0..graphs.len()).map(|i| i.to_string()).collect();
        Self::with_ids(graphs, labels, ids, None)
    }

    pub fn with_ids(
        graphs: Vec<AdjacencyMatrix>,
        labels: Vec<f64>,
        graph_ids: Vec<String>,
        subject_ids: Option<Vec<String>>,
    ) -> Result<Self> {
        let m = graphs.len();
        if m < 2 {
            return Err(Error::invalid(format!("need at least 2 graphs, got {m}")));
        }
        if labels.len() != m || graph_ids.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: if labels.len() != m {
                    labels.len()
                } else {
                    graph_ids.len()
                },
            });
        }
        if let Some(s) = &subject_ids {
            if s.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: s.len(),
                });
            }
        }
        if labels.iter().any(|y| !y.is_finite()) {
            return Err(Error::invalid("labels must be finite"));
        }
        let (n, directed) = (graphs[0].n(), graphs[0].is_directed());
        if let Some(g) = graphs
            .iter()
            .find(|g| g.n() != n || g.is_directed() != directed)
        {
            return Err(Error::invalid(format!(
                "graphs disagree on vertex count or directedness ({} vs {n} vertices)",
                g.n()
            )));
        }
        Ok(LabeledGraphDataset {
            graphs,
            labels,
            graph_ids,
            subject_ids,
            vertex_names: None,
        })
    }

    pub fn with_vertex_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: names.len(),
            });
        }
        self.vertex_names = Some(names);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn n(&self) -> usize {
        self.graphs[0].n()
    }

    pub fn is_directed(&self) -> bool {
        self.graphs[0].is_directed()
    }

    pub fn graphs(&self) -> &[AdjacencyMatrix] {
        &self.graphs
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn graph_ids(&self) -> &[String] {
        &self.graph_ids
    }

    pub fn subject_ids(&self) -> Option<&[String]> {
        self.subject_ids.as_deref()
    }

    pub fn vertex_names(&self) -> Option<&[String]> {
        self.vertex_names.as_deref()
    }

    pub fn vertex_name(&self, u: usize) -> String {
        match &self.vertex_names {
            Some(names) => names[u].clone(),
            None => u.to_string(),
        }
    }

    /// Distinct labels in ascending order.
    pub fn classes(&self) -> Vec<f64> {
        let mut c = self.labels.clone();
        c.sort_by(f64::total_cmp);
        c.dedup();
        c
    }

    pub fn is_binary(&self) -> bool {
        self.graphs.iter().all(AdjacencyMatrix::is_binary)
    }

    /// Sub-population at the given graph indices, in that order. May hold a
    /// single graph, which is only useful as a prediction target.
    pub fn subset(&self, indices: &[usize]) -> LabeledGraphDataset {
        LabeledGraphDataset {
            graphs: indices.iter().map(|&i| self.graphs[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            graph_ids: indices.iter().map(|&i| self.graph_ids[i].clone()).collect(),
            subject_ids: self
                .subject_ids
                .as_ref()
                .map(|s| indices.iter().map(|&i| s[i].clone()).collect()),
            vertex_names: self.vertex_names.clone(),
        }
    }

    /// Same graphs with replaced labels.
    pub fn with_labels(&self, labels: Vec<f64>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: labels.len(),
            });
        }
        let mut out = self.clone();
        out.labels = labels;
        Ok(out)
    }
}
