//! Signal subgraph estimation for populations of labeled graphs.
//!
//! Vertices are screened by the dependence between their adjacency rows and
//! the graph labels, either once ([`screen::screen_once`]) or iteratively on
//! shrinking induced subgraphs ([`screen::screen_iterative`]). The estimated
//! signal subgraph then feeds Bayes plug-in or nearest-neighbour classifiers,
//! evaluated by the harnesses in [`eval`].

pub mod classify;
pub mod corr;
pub mod error;
pub mod eval;
pub mod graph;
pub mod screen;

pub use classify::{
    bayes_predict, estimate_loss, fit_plugin, knn_predict, plugin_predict, BayesClassifier,
    GraphClassifier, KnnClassifier, LossEstimate, PluginModel,
};
pub use corr::{
    cca_corr, dcorr, dcov_sq, double_center, mgc, pairwise_distances, rv_coefficient,
    CorrelationKind, CorrelationValue, DistanceMatrix, Metric, SampleMatrix,
};
pub use error::{Error, Result};
pub use eval::{
    cross_validate, fpr_at_size, roc_auc, run_experiment1, run_experiment2, IerMixture, RocCurve,
};
pub use graph::{
    ier_log_likelihood, induced_subgraph, sample_ier, vertex_feature, AdjacencyMatrix,
    EdgeProbabilityMatrix, LabeledGraphDataset, VertexSet,
};
pub use screen::{
    score_vertices, screen_iterative, screen_once, select_size_by_gap, subgraph_correlation,
    vertex_ranking, ScoreSpec, ScreenConfig, ScreenMode, ScreeningResult, SizeRule, Statistic,
};
