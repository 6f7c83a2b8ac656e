//! Graph classifiers: Bayes optimal and plug-in rules under the IER model,
//! and k-nearest neighbours on induced adjacency matrices.

use crate::error::{Error, Result};
use crate::graph::{
    induced_subgraph, AdjacencyMatrix, EdgeProbabilityMatrix, LabeledGraphDataset, VertexSet,
};

pub trait GraphClassifier: Sync {
    /// Predicted label for a graph on the full vertex set.
    fn predict(&self, graph: &AdjacencyMatrix) -> Result<f64>;
}

/// Log-likelihood evaluator for one class restricted to a vertex set.
#[derive(Debug, Clone)]
struct ClassLikelihood {
    /// `ln π + Σ ln(1 − P)` over the restriction's pairs.
    base: f64,
    /// `ln P − ln(1 − P)` for every pair `u < v` of the restriction, 0 where
    /// `P = 1`.
    log_odds: Vec<f64>,
    /// Pairs with `P = 1`; a graph missing one has zero likelihood.
    certain: Vec<(usize, usize)>,
}

impl ClassLikelihood {
    fn new(prior: f64, p: &EdgeProbabilityMatrix, set: &VertexSet) -> Self {
        let k = set.len();
        let mut log_odds = Vec::with_capacity(k * k.saturating_sub(1) / 2);
        let mut base = prior.ln();
        let mut certain = Vec::new();
        let s = set.as_slice();
        for a in 0..k {
            for b in (a + 1)..k {
                let q = p.get(s[a], s[b]);
                if q >= 1.0 {
                    certain.push((s[a], s[b]));
                    log_odds.push(0.0);
                    continue;
                }
                let absent = (1.0 - q).ln();
                base += absent;
                log_odds.push(q.ln() - absent);
            }
        }
        ClassLikelihood {
            base,
            log_odds,
            certain,
        }
    }

    fn log_score(&self, graph: &AdjacencyMatrix, set: &VertexSet) -> f64 {
        if self.certain.iter().any(|&(u, v)| graph.get(u, v) == 0.0) {
            return f64::NEG_INFINITY;
        }
        let s = set.as_slice();
        let mut present = 0.0;
        let mut idx = 0;
        for a in 0..s.len() {
            let row = graph.row(s[a]);
            for &v in &s[a + 1..] {
                // a present edge is any nonzero weight, as at fit time
                present += if row[v] != 0.0 {
                    self.log_odds[idx]
                } else {
                    0.0
                };
                idx += 1;
            }
        }
        self.base + present
    }
}

/// Posterior argmax over classes in ascending label order; exact ties keep
/// the smaller label.
fn argmax_class(classes: &[f64], scores: impl Iterator<Item = f64>) -> f64 {
    let mut best = (classes[0], f64::NEG_INFINITY);
    for (i, s) in scores.enumerate() {
        if i == 0 || s > best.1 {
            best = (classes[i], s);
        }
    }
    best.0
}

fn check_graph(graph: &AdjacencyMatrix, n: usize) -> Result<()> {
    if graph.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: graph.n(),
        });
    }
    if graph.is_directed() || !graph.is_binary() {
        return Err(Error::invalid(
            "IER classifiers need undirected binary graphs",
        ));
    }
    Ok(())
}

/// Maximum-likelihood plug-in model on a vertex subset.
#[derive(Debug, Clone)]
pub struct PluginModel {
    classes: Vec<f64>,
    priors: Vec<f64>,
    /// Full-size matrices; only entries inside `restrict` are estimated.
    probabilities: Vec<EdgeProbabilityMatrix>,
    clamp: f64,
    restrict: VertexSet,
    n: usize,
    likelihoods: Vec<ClassLikelihood>,
}

impl PluginModel {
    pub fn classes(&self) -> &[f64] {
        &self.classes
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn probabilities(&self) -> &[EdgeProbabilityMatrix] {
        &self.probabilities
    }

    pub fn clamp(&self) -> f64 {
        self.clamp
    }

    pub fn restrict(&self) -> &VertexSet {
        &self.restrict
    }

    /// Log prior plus log-likelihood per class, in class order.
    pub fn log_posteriors(&self, graph: &AdjacencyMatrix) -> Result<Vec<f64>> {
        check_graph(graph, self.n)?;
        Ok(self
            .likelihoods
            .iter()
            .map(|c| c.log_score(graph, &self.restrict))
            .collect())
    }
}

impl GraphClassifier for PluginModel {
    fn predict(&self, graph: &AdjacencyMatrix) -> Result<f64> {
        let scores = self.log_posteriors(graph)?;
        Ok(argmax_class(&self.classes, scores.into_iter()))
    }
}

/// Fits priors by class frequency and per-class edge means on
/// `restrict`, clamped to `[1/(2m), 1 − 1/(2m)]`.
pub fn fit_plugin(ds: &LabeledGraphDataset, restrict: &VertexSet) -> Result<PluginModel> {
    fit_plugin_with_clamp(ds, restrict, 0.5 / ds.len() as f64)
}

/// As [`fit_plugin`] with an explicit clamp; `0.0` disables clamping.
pub fn fit_plugin_with_clamp(
    ds: &LabeledGraphDataset,
    restrict: &VertexSet,
    clamp: f64,
) -> Result<PluginModel> {
    restrict.check_within(ds.n())?;
    if ds.is_directed() || !ds.is_binary() {
        return Err(Error::Fit(
            "plug-in model needs undirected binary graphs".into(),
        ));
    }
    if !(0.0..0.5).contains(&clamp) {
        return Err(Error::Fit(format!("clamp {clamp} outside [0, 0.5)")));
    }
    let n = ds.n();
    let m = ds.len() as f64;
    let classes = ds.classes();
    let mut priors = Vec::with_capacity(classes.len());
    let mut probabilities = Vec::with_capacity(classes.len());
    for &c in &classes {
        let members: Vec<&AdjacencyMatrix> = ds
            .graphs()
            .iter()
            .zip(ds.labels())
            .filter(|(_, &y)| y == c)
            .map(|(g, _)| g)
            .collect();
        if members.is_empty() {
            return Err(Error::Fit(format!("class {c} has no training graphs")));
        }
        priors.push(members.len() as f64 / m);
        let mut sums = vec![0.0; n * n];
        for g in &members {
            for &u in restrict {
                let row = g.row(u);
                for &v in restrict {
                    sums[u * n + v] += row[v];
                }
            }
        }
        let count = members.len() as f64;
        let mean: Vec<f64> = sums.iter().map(|s| s / count).collect();
        let p = EdgeProbabilityMatrix::new(n, mean)?;
        probabilities.push(if clamp > 0.0 { p.clamped(clamp) } else { p });
    }
    let likelihoods = priors
        .iter()
        .zip(&probabilities)
        .map(|(&pi, p)| ClassLikelihood::new(pi, p, restrict))
        .collect();
    Ok(PluginModel {
        classes,
        priors,
        probabilities,
        clamp,
        restrict: restrict.clone(),
        n,
        likelihoods,
    })
}

/// Plug-in prediction; `restrict` must be the set the model was fitted on.
pub fn plugin_predict(
    model: &PluginModel,
    graph: &AdjacencyMatrix,
    restrict: &VertexSet,
) -> Result<f64> {
    if restrict != model.restrict() {
        return Err(Error::invalid("model was fitted on a different vertex set"));
    }
    model.predict(graph)
}

/// Bayes rule with known parameters.
#[derive(Debug, Clone)]
pub struct BayesClassifier {
    classes: Vec<f64>,
    n: usize,
    restrict: VertexSet,
    likelihoods: Vec<ClassLikelihood>,
}

impl BayesClassifier {
    /// `classes[i]` has prior `priors[i]` and edge probabilities `probs[i]`.
    pub fn new(
        classes: Vec<f64>,
        priors: Vec<f64>,
        probs: Vec<EdgeProbabilityMatrix>,
    ) -> Result<Self> {
        if classes.is_empty() || classes.len() != priors.len() || classes.len() != probs.len() {
            return Err(Error::invalid("classes, priors and models must align"));
        }
        if classes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("classes must be strictly ascending"));
        }
        let total: f64 = priors.iter().sum();
        if priors.iter().any(|&p| p < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("priors must be nonnegative and sum to 1"));
        }
        let n = probs[0].n();
        if probs.iter().any(|p| p.n() != n) {
            return Err(Error::invalid("edge probability matrices differ in size"));
        }
        let restrict = VertexSet::full(n);
        let likelihoods = priors
            .iter()
            .zip(&probs)
            .map(|(&pi, p)| ClassLikelihood::new(pi, p, &restrict))
            .collect();
        Ok(BayesClassifier {
            classes,
            n,
            restrict,
            likelihoods,
        })
    }
}

impl GraphClassifier for BayesClassifier {
    fn predict(&self, graph: &AdjacencyMatrix) -> Result<f64> {
        check_graph(graph, self.n)?;
        let scores = self
            .likelihoods
            .iter()
            .map(|c| c.log_score(graph, &self.restrict));
        Ok(argmax_class(&self.classes, scores))
    }
}

/// One-off Bayes prediction. Classes are `0, 1, …` in parameter order.
pub fn bayes_predict(
    priors: &[f64],
    probs: &[EdgeProbabilityMatrix],
    graph: &AdjacencyMatrix,
) -> Result<f64> {
    let classes = (0..priors.len()).map(|c| c as f64).collect();
    BayesClassifier::new(classes, priors.to_vec(), probs.to_vec())?.predict(graph)
}

/// k-nearest-neighbour vote under the Frobenius distance between induced
/// adjacency matrices. Distance ties go to the earlier training graph, vote
/// ties to the smaller label.
#[derive(Debug, Clone)]
pub struct KnnClassifier {
    train: Vec<(AdjacencyMatrix, f64)>,
    k: usize,
    restrict: VertexSet,
    n: usize,
}

impl KnnClassifier {
    pub fn fit(ds: &LabeledGraphDataset, k: usize, restrict: &VertexSet) -> Result<Self> {
        restrict.check_within(ds.n())?;
        if k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if ds.is_empty() {
            return Err(Error::Fit("empty training set".into()));
        }
        if k > ds.len() {
            return Err(Error::invalid(format!(
                "k = {k} exceeds the {} training graphs",
                ds.len()
            )));
        }
        let train = ds
            .graphs()
            .iter()
            .zip(ds.labels())
            .map(|(g, &y)| Ok((induced_subgraph(g, restrict)?, y)))
            .collect::<Result<_>>()?;
        Ok(KnnClassifier {
            train,
            k,
            restrict: restrict.clone(),
            n: ds.n(),
        })
    }
}

impl GraphClassifier for KnnClassifier {
    fn predict(&self, graph: &AdjacencyMatrix) -> Result<f64> {
        if graph.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: graph.n(),
            });
        }
        let query = induced_subgraph(graph, &self.restrict)?;
        let mut dist: Vec<(f64, usize)> = self
            .train
            .iter()
            .enumerate()
            .map(|(i, (g, _))| {
                let d: f64 = g
                    .as_slice()
                    .iter()
                    .zip(query.as_slice())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (d, i)
            })
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes: Vec<(f64, usize)> = Vec::new();
        for &(_, i) in &dist[..self.k] {
            let y = self.train[i].1;
            match votes.iter_mut().find(|(c, _)| *c == y) {
                Some(entry) => entry.1 += 1,
                None => votes.push((y, 1)),
            }
        }
        votes.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.total_cmp(&b.0)));
        Ok(votes[0].0)
    }
}

pub fn knn_predict(
    train: &LabeledGraphDataset,
    graph: &AdjacencyMatrix,
    k: usize,
    restrict: &VertexSet,
) -> Result<f64> {
    KnnClassifier::fit(train, k, restrict)?.predict(graph)
}

/// Empirical 0–1 loss.
#[derive(Debug, Clone, PartialEq)]
pub struct LossEstimate {
    pub error: f64,
    pub misclassified: usize,
    pub total: usize,
    /// `√(p̂(1−p̂)/N)`.
    pub standard_error: f64,
    /// `(truth, predicted)` pairs in evaluation order.
    pub predictions: Vec<(f64, f64)>,
    pub folds: usize,
}

impl LossEstimate {
    /// Aggregates `(truth, predicted)` pairs.
    pub fn from_predictions(predictions: Vec<(f64, f64)>, folds: usize) -> Result<Self> {
        if predictions.is_empty() {
            return Err(Error::invalid("no evaluation instances"));
        }
        let total = predictions.len();
        let misclassified = predictions.iter().filter(|(t, p)| t != p).count();
        let error = misclassified as f64 / total as f64;
        Ok(LossEstimate {
            error,
            misclassified,
            total,
            standard_error: (error * (1.0 - error) / total as f64).sqrt(),
            predictions,
            folds,
        })
    }
}

/// Misclassification rate of `classifier` over labeled test graphs.
pub fn estimate_loss<C: GraphClassifier + ?Sized>(
    classifier: &C,
    test: &[(AdjacencyMatrix, f64)],
) -> Result<LossEstimate> {
    use rayon::prelude::*;
    let predictions = test
        .par_iter()
        .map(|(g, y)| Ok((*y, classifier.predict(g)?)))
        .collect::<Result<Vec<_>>>()?;
    LossEstimate::from_predictions(predictions, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ier_log_likelihood, sample_ier};

    fn edge_graph(n: usize, edges: &[(usize, usize)]) -> AdjacencyMatrix {
        let mut g = AdjacencyMatrix::zeros(n, false);
        for &(u, v) in edges {
            g.set_edge(u, v, 1.0).unwrap();
        }
        g
    }

    #[test]
    fn priors_and_edge_means() {
        let graphs = vec![
            edge_graph(3, &[(0, 1)]),
            edge_graph(3, &[]),
            edge_graph(3, &[(1, 2)]),
            edge_graph(3, &[(1, 2), (0, 1)]),
        ];
        let ds = LabeledGraphDataset::new(graphs, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        let model = fit_plugin_with_clamp(&ds, &VertexSet::full(3), 0.0).unwrap();
        assert_eq!(model.priors(), &[0.5, 0.5]);
        assert_eq!(model.probabilities()[0].get(0, 1), 0.5);
        assert_eq!(model.probabilities()[1].get(1, 2), 1.0);
        let clamped = fit_plugin(&ds, &VertexSet::full(3)).unwrap();
        assert_eq!(clamped.clamp(), 0.125);
        assert_eq!(clamped.probabilities()[1].get(1, 2), 0.875);
        assert_eq!(clamped.probabilities()[0].get(0, 2), 0.125);
    }

    #[test]
    fn identical_classes_tie_to_smaller_label() {
        let g = edge_graph(3, &[(0, 1)]);
        let ds = LabeledGraphDataset::new(vec![g.clone(), g.clone()], vec![3.0, 1.0]).unwrap();
        let model = fit_plugin(&ds, &VertexSet::full(3)).unwrap();
        assert_eq!(model.predict(&g).unwrap(), 1.0);
    }

    #[test]
    fn single_vertex_uses_priors() {
        let graphs = vec![
            edge_graph(3, &[(0, 1)]),
            edge_graph(3, &[(0, 1)]),
            edge_graph(3, &[]),
        ];
        let ds = LabeledGraphDataset::new(graphs, vec![0.0, 1.0, 1.0]).unwrap();
        let set = VertexSet::new(vec![1]).unwrap();
        let model = fit_plugin(&ds, &set).unwrap();
        assert_eq!(
            plugin_predict(&model, &edge_graph(3, &[(0, 1)]), &set).unwrap(),
            1.0
        );
        assert!(plugin_predict(&model, &edge_graph(3, &[]), &VertexSet::full(3)).is_err());
    }

    #[test]
    fn missing_class_fails() {
        let g = edge_graph(2, &[]);
        let ds = LabeledGraphDataset::new(vec![g.clone(), g], vec![0.0, 0.0]).unwrap();
        assert!(fit_plugin(&ds, &VertexSet::full(2)).is_ok());
        let weighted = LabeledGraphDataset::new(
            vec![
                AdjacencyMatrix::new(2, vec![0.0, 0.5, 0.5, 0.0], false).unwrap(),
                edge_graph(2, &[]),
            ],
            vec![0.0, 1.0],
        )
        .unwrap();
        assert!(matches!(
            fit_plugin(&weighted, &VertexSet::full(2)),
            Err(Error::Fit(_))
        ));
    }

    #[test]
    fn bayes_degenerate_prior_and_indistinguishable() {
        let p = EdgeProbabilityMatrix::constant(5, 0.3).unwrap();
        let q = EdgeProbabilityMatrix::constant(5, 0.9).unwrap();
        let g = sample_ier(&q, 1);
        assert_eq!(
            bayes_predict(&[1.0, 0.0], &[p.clone(), q.clone()], &g).unwrap(),
            0.0
        );
        assert_eq!(
            bayes_predict(&[0.5, 0.5], &[p.clone(), p.clone()], &g).unwrap(),
            0.0
        );
        assert_eq!(bayes_predict(&[0.5, 0.5], &[p, q], &g).unwrap(), 1.0);
    }

    #[test]
    fn bayes_score_matches_likelihood() {
        let p = EdgeProbabilityMatrix::constant(6, 0.2).unwrap();
        let g = sample_ier(&p, 9);
        let lik = ClassLikelihood::new(0.25, &p, &VertexSet::full(6));
        let expected = 0.25f64.ln() + ier_log_likelihood(&g, &p).unwrap();
        assert!((lik.log_score(&g, &VertexSet::full(6)) - expected).abs() < 1e-12);
    }

    #[test]
    fn knn_cases() {
        let graphs = vec![
            edge_graph(4, &[(0, 1)]),
            edge_graph(4, &[(2, 3)]),
            edge_graph(4, &[(0, 1), (1, 2)]),
        ];
        let ds = LabeledGraphDataset::new(graphs.clone(), vec![0.0, 1.0, 0.0]).unwrap();
        let all = VertexSet::full(4);
        assert_eq!(knn_predict(&ds, &graphs[1], 1, &all).unwrap(), 1.0);
        assert_eq!(knn_predict(&ds, &graphs[1], 3, &all).unwrap(), 0.0);
        assert!(knn_predict(&ds, &graphs[1], 4, &all).is_err());
        assert!(knn_predict(&ds, &graphs[1], 0, &all).is_err());
        // vote tie between labels 0 and 1 at k = 2 goes to the smaller label
        let ds2 = LabeledGraphDataset::new(graphs.clone(), vec![1.0, 0.0, 1.0]).unwrap();
        assert_eq!(
            knn_predict(&ds2, &edge_graph(4, &[(0, 1), (2, 3)]), 2, &all).unwrap(),
            0.0
        );
    }

    #[test]
    fn loss_estimates() {
        let l = LossEstimate::from_predictions(vec![(0.0, 0.0), (1.0, 1.0)], 1).unwrap();
        assert_eq!(l.error, 0.0);
        let l =
            LossEstimate::from_predictions(vec![(0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (1.0, 0.0)], 1)
                .unwrap();
        assert_eq!(l.error, 0.5);
        assert_eq!(l.standard_error, 0.25);
        assert!(LossEstimate::from_predictions(vec![], 1).is_err());
    }
}
