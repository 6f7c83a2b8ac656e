//! Vertex screening.
//!
//! Each vertex is scored by the dependence between its adjacency row and the
//! labels. One-shot screening thresholds those scores; iterative screening
//! repeatedly drops the lowest-scoring `δ` fraction, rescoring on the
//! shrinking induced subgraph, and keeps the level whose whole subgraph is
//! most dependent on the labels.

mod kernel;

use std::cmp::Ordering;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::corr::{
    cca_from_gram, center_matrix, centered_columns, clamp_unit, gram_from_sq_distances, mgc_sides,
    one_hot, pairwise_distances, DistanceMatrix, Metric, MgcSide, SampleMatrix, DEGENERATE_EPS,
};
use crate::error::{Error, Result};
use crate::graph::{LabeledGraphDataset, VertexSet};

pub(crate) use kernel::FeatureKernel;
use kernel::{upper_triangle, PairDistances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Statistic {
    #[default]
    Dcorr,
    Mgc,
    Rv,
    Cca,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Dcorr => "dcorr",
            Statistic::Mgc => "mgc",
            Statistic::Rv => "rv",
            Statistic::Cca => "cca",
        }
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dcorr" => Ok(Statistic::Dcorr),
            "mgc" => Ok(Statistic::Mgc),
            "rv" => Ok(Statistic::Rv),
            "cca" => Ok(Statistic::Cca),
            other => Err(Error::invalid(format!("unknown statistic {other:?}"))),
        }
    }
}

/// Statistic plus the metric used on labels by the distance-based
/// statistics. RV and CCA always see one-hot encoded labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScoreSpec {
    pub statistic: Statistic,
    pub label_metric: Metric,
}

impl ScoreSpec {
    pub fn new(statistic: Statistic) -> Self {
        ScoreSpec {
            statistic,
            label_metric: Metric::Discrete,
        }
    }
}

impl From<Statistic> for ScoreSpec {
    fn from(statistic: Statistic) -> Self {
        ScoreSpec::new(statistic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScreenMode {
    OneShot { threshold: f64 },
    Iterative { delta: f64, min_size: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub vertices: VertexSet,
    /// Statistic between the flattened induced subgraphs and the labels.
    pub correlation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreeningResult {
    pub n: usize,
    pub spec: ScoreSpec,
    pub mode: ScreenMode,
    /// Last computed score of every vertex.
    pub scores: Vec<f64>,
    /// Iteration (1-based) in which a vertex was removed; `None` for
    /// survivors of the final level and for one-shot runs.
    pub elimination: Vec<Option<usize>>,
    pub levels: Vec<Level>,
    pub selected: VertexSet,
}

impl ScreeningResult {
    /// The first `k` vertices of [`vertex_ranking`].
    pub fn top(&self, k: usize) -> Result<VertexSet> {
        if k > self.n {
            return Err(Error::invalid(format!(
                "requested {k} vertices from a {}-vertex graph",
                self.n
            )));
        }
        Ok(VertexSet::from_unsorted(vertex_ranking(self)[..k].to_vec()))
    }

    pub fn is_iterative(&self) -> bool {
        matches!(self.mode, ScreenMode::Iterative { .. })
    }
}

/// Label-side quantities shared by every vertex score.
struct LabelSide {
    /// Strict upper triangle of the double-centered label distances.
    centered: Vec<f64>,
    /// `Σ C∘C`.
    centered_ss: f64,
    mgc: MgcSide,
    onehot_centered: DMatrix<f64>,
    /// Strict upper triangle of the centered one-hot Gram matrix.
    gram: Vec<f64>,
    gram_ss: f64,
}

impl LabelSide {
    fn new(labels: &[f64], metric: Metric) -> Result<Self> {
        let y = SampleMatrix::from_column(labels)?;
        let dy = pairwise_distances(&y, metric)?;
        let onehot_centered = centered_columns(&one_hot(labels)?);
        let gram = &onehot_centered * onehot_centered.transpose();
        let centered = center_matrix(dy.as_matrix());
        Ok(LabelSide {
            centered: upper_triangle(&centered),
            centered_ss: centered.dot(&centered),
            mgc: MgcSide::new(&dy),
            onehot_centered,
            gram: upper_triangle(&gram),
            gram_ss: gram.dot(&gram),
        })
    }
}

/// `xy / √(xx·yy)` in `[0, 1]` from unscaled sums over `m × m` entries, or
/// 0 when either side is degenerate.
fn normalized(xy: f64, xx: f64, yy: f64, m: usize) -> f64 {
    let scale = 1.0 / (m * m) as f64;
    let (xy, xx, yy) = (xy * scale, xx * scale, yy * scale);
    if xx <= DEGENERATE_EPS || yy <= DEGENERATE_EPS {
        return 0.0;
    }
    clamp_unit(xy / (xx * yy).sqrt())
}

/// A dataset prepared for repeated scoring.
struct Screener<'a> {
    kernel: FeatureKernel,
    labels: LabelSide,
    spec: ScoreSpec,
    ds: &'a LabeledGraphDataset,
}

impl<'a> Screener<'a> {
    fn new(ds: &'a LabeledGraphDataset, spec: ScoreSpec) -> Result<Self> {
        if spec.statistic == Statistic::Mgc && ds.len() < 4 {
            return Err(Error::invalid("mgc screening needs at least 4 graphs"));
        }
        Ok(Screener {
            kernel: FeatureKernel::new(ds),
            labels: LabelSide::new(ds.labels(), spec.label_metric)?,
            spec,
            ds,
        })
    }

    fn statistic(&self, sq: &PairDistances, dim: usize) -> Result<f64> {
        let labels = &self.labels;
        Ok(match self.spec.statistic {
            Statistic::Dcorr => {
                let (xy, xx) = sq.centered_moments(|v| v.max(0.0).sqrt(), &labels.centered);
                normalized(xy.max(0.0), xx, labels.centered_ss, self.ds.len())
            }
            Statistic::Mgc => {
                let side = MgcSide::new(&DistanceMatrix::from_squared_euclidean(&sq.to_matrix()));
                mgc_sides(&side, &labels.mgc)?.value
            }
            Statistic::Rv => {
                // Kx = −½·H·D²·H
                let (xy, xx) = sq.centered_moments(|v| v, &labels.gram);
                normalized(-0.5 * xy, 0.25 * xx, labels.gram_ss, self.ds.len())
            }
            Statistic::Cca => cca_from_gram(
                &gram_from_sq_distances(&sq.to_matrix()),
                dim,
                &labels.onehot_centered,
            ),
        })
    }

    /// Scores aligned with the order of `set`.
    fn scores(&self, set: &VertexSet) -> Result<Vec<f64>> {
        set.check_within(self.ds.n())?;
        let mask = self.kernel.mask(set);
        set.as_slice()
            .par_iter()
            .map(|&u| {
                let sq = self.kernel.vertex_sq_distances(u, set, &mask);
                self.statistic(&sq, set.len())
            })
            .collect()
    }

    fn subgraph_correlation(&self, set: &VertexSet) -> Result<f64> {
        let mask = self.kernel.mask(set);
        let sq = self.kernel.subgraph_sq_distances(set, &mask);
        self.statistic(&sq, self.kernel.subgraph_dim(set.len()))
    }
}

/// Score of every vertex of `restrict`, in set order: the chosen statistic
/// between `{A_i[restrict][u, ·]}` and the labels.
pub fn score_vertices(
    ds: &LabeledGraphDataset,
    restrict: &VertexSet,
    spec: impl Into<ScoreSpec>,
) -> Result<Vec<f64>> {
    if restrict.is_empty() {
        return Err(Error::invalid("restriction set is empty"));
    }
    Screener::new(ds, spec.into())?.scores(restrict)
}

/// Statistic between the whole induced subgraphs `A_i[set]` and the labels.
pub fn subgraph_correlation(
    ds: &LabeledGraphDataset,
    set: &VertexSet,
    spec: impl Into<ScoreSpec>,
) -> Result<f64> {
    set.check_within(ds.n())?;
    Screener::new(ds, spec.into())?.subgraph_correlation(set)
}

/// One-shot screening: keeps vertices whose score strictly exceeds
/// `threshold`.
pub fn screen_once(
    ds: &LabeledGraphDataset,
    threshold: f64,
    spec: impl Into<ScoreSpec>,
) -> Result<ScreeningResult> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::invalid(format!(
            "threshold {threshold} outside [0, 1]"
        )));
    }
    let spec = spec.into();
    let screener = Screener::new(ds, spec)?;
    let all = VertexSet::full(ds.n());
    let scores = screener.scores(&all)?;
    let selected =
        VertexSet::from_unsorted((0..ds.n()).filter(|&u| scores[u] > threshold).collect());
    let correlation = screener.subgraph_correlation(&all)?;
    Ok(ScreeningResult {
        n: ds.n(),
        spec,
        mode: ScreenMode::OneShot { threshold },
        scores,
        elimination: vec![None; ds.n()],
        levels: vec![Level {
            vertices: all,
            correlation,
        }],
        selected,
    })
}

/// Iterative screening.
///
/// Each round scores the current vertex set on its induced subgraph and keeps
/// the vertices scoring strictly above the empirical `δ`-quantile (linear
/// interpolation). When ties make that keep none or all of them, the top
/// `⌈(1−δ)|V|⌉` by score are kept instead (ties to the smaller vertex), capped
/// so every round removes at least one vertex. Rounds stop once at most
/// `min_size` vertices remain; the level with the largest whole-subgraph
/// statistic is selected, preferring the larger subgraph on ties.
pub fn screen_iterative(
    ds: &LabeledGraphDataset,
    delta: f64,
    spec: impl Into<ScoreSpec>,
    min_size: usize,
) -> Result<ScreeningResult> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta {delta} outside (0, 1)")));
    }
    let min_size = min_size.max(1);
    let spec = spec.into();
    let screener = Screener::new(ds, spec)?;
    let n = ds.n();
    let mut scores = vec![0.0; n];
    let mut elimination = vec![None; n];
    let mut levels = Vec::new();
    let mut current = VertexSet::full(n);
    let mut round = 1;
    loop {
        let correlation = screener.subgraph_correlation(&current)?;
        levels.push(Level {
            vertices: current.clone(),
            correlation,
        });
        if current.len() <= min_size {
            break;
        }
        let level_scores = screener.scores(&current)?;
        for (&u, &s) in current.iter().zip(&level_scores) {
            scores[u] = s;
        }
        let keep = survivors(current.as_slice(), &level_scores, delta);
        for &u in &current {
            if !keep.contains(u) {
                elimination[u] = Some(round);
            }
        }
        current = keep;
        round += 1;
    }

    let mut best = 0;
    for (k, level) in levels.iter().enumerate() {
        if level.correlation > levels[best].correlation {
            best = k;
        }
    }
    Ok(ScreeningResult {
        n,
        spec,
        mode: ScreenMode::Iterative { delta, min_size },
        scores,
        elimination,
        selected: levels[best].vertices.clone(),
        levels,
    })
}

fn survivors(vertices: &[usize], scores: &[f64], delta: f64) -> VertexSet {
    let len = vertices.len();
    let t = quantile(scores, delta);
    let strict: Vec<usize> = vertices
        .iter()
        .zip(scores)
        .filter(|(_, &s)| s > t)
        .map(|(&u, _)| u)
        .collect();
    if !strict.is_empty() && strict.len() < len {
        return VertexSet::from_unsorted(strict);
    }
    let keep = (((1.0 - delta) * len as f64).ceil() as usize).clamp(1, len - 1);
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| by_score_desc(scores[a], scores[b]).then(vertices[a].cmp(&vertices[b])));
    VertexSet::from_unsorted(order[..keep].iter().map(|&i| vertices[i]).collect())
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn by_score_desc(a: f64, b: f64) -> Ordering {
    b.total_cmp(&a)
}

/// Total order over all vertices, best first.
///
/// One-shot: by score, ties to the smaller vertex index. Iterative: survivors
/// first, then by how late the vertex was eliminated, then by its score at
/// elimination, then by index.
pub fn vertex_ranking(result: &ScreeningResult) -> Vec<usize> {
    let mut order: Vec<usize> = (0..result.n).collect();
    let depth = |u: usize| result.elimination[u].unwrap_or(usize::MAX);
    order.sort_by(|&a, &b| {
        depth(b)
            .cmp(&depth(a))
            .then(by_score_desc(result.scores[a], result.scores[b]))
            .then(a.cmp(&b))
    });
    order
}

/// Outcome of [`select_size_by_gap`].
#[derive(Debug, Clone, PartialEq)]
pub struct GapSelection {
    /// Indices into the score slice above the largest gap.
    pub selected: VertexSet,
    /// All scores were equal, so no gap exists and everything is selected.
    pub degenerate: bool,
}

/// Cuts the descending scores at their largest consecutive drop. Equal gaps
/// resolve to the earliest (highest-score) cut.
pub fn select_size_by_gap(scores: &[f64]) -> Result<GapSelection> {
    if scores.len() < 2 {
        return Err(Error::invalid("gap selection needs at least 2 scores"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| by_score_desc(scores[a], scores[b]).then(a.cmp(&b)));
    let mut cut = 0;
    let mut widest = 0.0;
    for w in 0..order.len() - 1 {
        let gap = scores[order[w]] - scores[order[w + 1]];
        if gap > widest {
            widest = gap;
            cut = w + 1;
        }
    }
    if cut == 0 {
        return Ok(GapSelection {
            selected: VertexSet::full(scores.len()),
            degenerate: true,
        });
    }
    Ok(GapSelection {
        selected: VertexSet::from_unsorted(order[..cut].to_vec()),
        degenerate: false,
    })
}

/// How the final vertex set is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeRule {
    /// Level with the largest whole-subgraph statistic (iterative only).
    MaxCorr,
    /// Largest gap among the final scores.
    Gap,
    /// The top `k` of the vertex ranking.
    Fixed(usize),
}

/// Screening run description, as used by the cross-validation harness and the
/// command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenConfig {
    pub spec: ScoreSpec,
    pub mode: ScreenMode,
    /// `None` keeps the mode's own rule: the threshold for one-shot runs, the
    /// maximal subgraph statistic for iterative ones.
    pub size_rule: Option<SizeRule>,
}

impl ScreenConfig {
    pub fn iterative(statistic: Statistic, delta: f64) -> Self {
        ScreenConfig {
            spec: statistic.into(),
            mode: ScreenMode::Iterative { delta, min_size: 1 },
            size_rule: None,
        }
    }

    pub fn one_shot(statistic: Statistic, threshold: f64) -> Self {
        ScreenConfig {
            spec: statistic.into(),
            mode: ScreenMode::OneShot { threshold },
            size_rule: None,
        }
    }

    pub fn with_size_rule(mut self, rule: SizeRule) -> Self {
        self.size_rule = Some(rule);
        self
    }

    pub fn run(&self, ds: &LabeledGraphDataset) -> Result<ScreeningResult> {
        let mut result = match self.mode {
            ScreenMode::OneShot { threshold } => {
                if self.size_rule == Some(SizeRule::MaxCorr) {
                    return Err(Error::invalid(
                        "the maxcorr size rule needs iterative screening",
                    ));
                }
                screen_once(ds, threshold, self.spec)?
            }
            ScreenMode::Iterative { delta, min_size } => {
                screen_iterative(ds, delta, self.spec, min_size)?
            }
        };
        match self.size_rule {
            None | Some(SizeRule::MaxCorr) => {}
            Some(SizeRule::Fixed(k)) => result.selected = result.top(k)?,
            Some(SizeRule::Gap) => result.selected = select_size_by_gap(&result.scores)?.selected,
        }
        Ok(result)
    }
}
