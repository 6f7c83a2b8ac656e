//! Simulation experiments on two- and three-class IER mixtures whose classes
//! differ only on a 20-vertex signal block.

use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{fpr_at_size, mean_and_se, roc_auc, RocCurve};
use crate::classify::{estimate_loss, fit_plugin, BayesClassifier};
use crate::error::{Error, Result};
use crate::graph::{
    sample_ier_with, AdjacencyMatrix, EdgeProbabilityMatrix, LabeledGraphDataset, VertexSet,
};
use crate::screen::{vertex_ranking, ScreenConfig, SizeRule, Statistic};

pub const SIGNAL_SIZE: usize = 20;
const NOISE_SIZE: usize = 180;
const CROSS_PROB: f64 = 0.2;
const NOISE_PROB: f64 = 0.3;

/// Per-repeat seed.
pub fn derive_seed(base: u64, repeat: usize) -> u64 {
    base ^ repeat as u64
}

/// Labeled IER mixture: `Y` is drawn from the priors, then `A | Y = y` from
/// the class model.
#[derive(Debug, Clone)]
pub struct IerMixture {
    classes: Vec<f64>,
    priors: Vec<f64>,
    models: Vec<EdgeProbabilityMatrix>,
    signal: VertexSet,
}

impl IerMixture {
    pub fn new(
        classes: Vec<f64>,
        priors: Vec<f64>,
        models: Vec<EdgeProbabilityMatrix>,
        signal: VertexSet,
    ) -> Result<Self> {
        // validates alignment, ordering, priors and sizes
        BayesClassifier::new(classes.clone(), priors.clone(), models.clone())?;
        signal.check_within(models[0].n())?;
        Ok(IerMixture {
            classes,
            priors,
            models,
            signal,
        })
    }

    /// 200 vertices; the first 20 connect with probability `p[y]` among
    /// themselves, 0.2 to the rest, and the rest connect with 0.3. Classes
    /// are `0, 1, …` with equal priors.
    pub fn signal_block(signal_probs: &[f64]) -> Result<Self> {
        let k = signal_probs.len();
        let models = signal_probs
            .iter()
            .map(|&p| {
                EdgeProbabilityMatrix::from_blocks(
                    &[SIGNAL_SIZE, NOISE_SIZE],
                    &[vec![p, CROSS_PROB], vec![CROSS_PROB, NOISE_PROB]],
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            (0..k).map(|y| y as f64).collect(),
            vec![1.0 / k as f64; k],
            models,
            VertexSet::full(SIGNAL_SIZE),
        )
    }

    /// Two classes, signal block 0.3 against 0.4.
    pub fn experiment1() -> Self {
        Self::signal_block(&[0.3, 0.4]).expect("valid block model")
    }

    /// Three classes, signal block 0.3, 0.4 and 0.5.
    pub fn experiment2() -> Self {
        Self::signal_block(&[0.3, 0.4, 0.5]).expect("valid block model")
    }

    /// `exp1` or `exp2`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "exp1" => Ok(Self::experiment1()),
            "exp2" => Ok(Self::experiment2()),
            other => Err(Error::invalid(format!(
                "unknown experiment {other:?} (expected exp1 or exp2)"
            ))),
        }
    }

    pub fn n(&self) -> usize {
        self.models[0].n()
    }

    pub fn classes(&self) -> &[f64] {
        &self.classes
    }

    pub fn models(&self) -> &[EdgeProbabilityMatrix] {
        &self.models
    }

    pub fn signal(&self) -> &VertexSet {
        &self.signal
    }

    pub fn bayes(&self) -> BayesClassifier {
        BayesClassifier::new(
            self.classes.clone(),
            self.priors.clone(),
            self.models.clone(),
        )
        .expect("validated at construction")
    }

    /// `m` labeled graphs drawn one after another (label, then edges).
    pub fn draw<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Vec<(AdjacencyMatrix, f64)> {
        (0..m)
            .map(|_| {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut y = self.classes.len() - 1;
                for (i, &p) in self.priors.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        y = i;
                        break;
                    }
                }
                (sample_ier_with(&self.models[y], rng), self.classes[y])
            })
            .collect()
    }

    pub fn sample_with<R: Rng + ?Sized>(
        &self,
        m: usize,
        rng: &mut R,
    ) -> Result<LabeledGraphDataset> {
        if m < 2 {
            return Err(Error::invalid(format!("need at least 2 graphs, got {m}")));
        }
        let (graphs, labels) = self.draw(m, rng).into_iter().unzip();
        LabeledGraphDataset::new(graphs, labels)
    }

    pub fn sample(&self, m: usize, seed: u64) -> Result<LabeledGraphDataset> {
        self.sample_with(m, &mut ChaCha8Rng::seed_from_u64(seed))
    }
}

/// Screening method compared in the experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Dcorr,
    Mgc,
    ItDcorr(f64),
    ItMgc(f64),
    Rv,
    Cca,
}

impl Method {
    /// The four methods of the AUC comparison.
    pub fn auc_table() -> Vec<Method> {
        vec![Method::Dcorr, Method::ItDcorr(0.5), Method::Rv, Method::Cca]
    }

    pub fn name(&self) -> String {
        match self {
            Method::Dcorr => "Dcorr".into(),
            Method::Mgc => "MGC".into(),
            Method::ItDcorr(d) => format!("ItDcorr-{d:.2}"),
            Method::ItMgc(d) => format!("ItMGC-{d:.2}"),
            Method::Rv => "RV".into(),
            Method::Cca => "CCA".into(),
        }
    }

    /// Screening run behind the method. One-shot methods use threshold 0;
    /// the experiments only consume the ranking or a fixed-size cut.
    pub fn config(&self) -> ScreenConfig {
        match *self {
            Method::Dcorr => ScreenConfig::one_shot(Statistic::Dcorr, 0.0),
            Method::Mgc => ScreenConfig::one_shot(Statistic::Mgc, 0.0),
            Method::ItDcorr(d) => ScreenConfig::iterative(Statistic::Dcorr, d),
            Method::ItMgc(d) => ScreenConfig::iterative(Statistic::Mgc, d),
            Method::Rv => ScreenConfig::one_shot(Statistic::Rv, 0.0),
            Method::Cca => ScreenConfig::one_shot(Statistic::Cca, 0.0),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    /// `dcorr`, `mgc`, `rv`, `cca`, `itdcorr[-δ]`, `itmgc[-δ]`; δ defaults
    /// to 0.5 for ItDcorr and 0.05 for ItMGC.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let (head, delta) = match lower.split_once('-') {
            Some((h, d)) => {
                let d: f64 = d
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad delta in method {s:?}")))?;
                (h, Some(d))
            }
            None => (lower.as_str(), None),
        };
        let check = |d: f64| {
            if d > 0.0 && d < 1.0 {
                Ok(d)
            } else {
                Err(Error::invalid(format!("delta must lie in (0, 1), got {d}")))
            }
        };
        match (head, delta) {
            ("dcorr", None) => Ok(Method::Dcorr),
            ("mgc", None) => Ok(Method::Mgc),
            ("rv", None) => Ok(Method::Rv),
            ("cca", None) => Ok(Method::Cca),
            ("itdcorr", d) => Ok(Method::ItDcorr(check(d.unwrap_or(0.5))?)),
            ("itmgc", d) => Ok(Method::ItMgc(check(d.unwrap_or(0.05))?)),
            _ => Err(Error::invalid(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Exp1Config {
    pub m: usize,
    pub repeats: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    /// Size of the fixed cut whose false positive rate is recorded.
    pub size: usize,
}

impl Default for Exp1Config {
    fn default() -> Self {
        Exp1Config {
            m: 100,
            repeats: 50,
            seed: 1,
            methods: Method::auc_table(),
            size: SIGNAL_SIZE,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Exp2Config {
    pub m_grid: Vec<usize>,
    pub repeats: usize,
    pub seed: u64,
    pub test_draws: usize,
    /// Screening methods feeding the subgraph plug-in classifier.
    pub methods: Vec<Method>,
    pub size: usize,
}

impl Default for Exp2Config {
    fn default() -> Self {
        Exp2Config {
            m_grid: vec![60, 150, 300, 600],
            repeats: 10,
            seed: 1,
            test_draws: 2000,
            methods: vec![Method::ItDcorr(0.5), Method::Dcorr],
            size: SIGNAL_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AucRecord {
    pub method: String,
    pub repeat: usize,
    pub auc: f64,
    /// Wall-clock screening time; logged, never written to CSV.
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FprRecord {
    pub method: String,
    pub m: usize,
    pub repeat: usize,
    pub fpr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossRecord {
    pub method: String,
    pub m: usize,
    pub repeat: usize,
    pub error: f64,
    pub misclassified: usize,
    pub total: usize,
}

/// Mean and standard error of one metric for one method (and sample size).
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: String,
    pub m: usize,
    pub metric: &'static str,
    pub mean: f64,
    /// Sample standard deviation over `√repeats`; `None` for one repeat.
    pub se: Option<f64>,
    pub repeats: usize,
    /// Mean wall-clock seconds, when timed.
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    pub auc: Vec<AucRecord>,
    pub fpr: Vec<FprRecord>,
    pub loss: Vec<LossRecord>,
    /// ROC curve of the first repeat, per method.
    pub roc: Vec<(String, RocCurve)>,
    /// Seed of every repeat.
    pub seeds: Vec<u64>,
    /// Sample size of the AUC records.
    pub auc_m: usize,
}

fn group_by<T>(
    records: &[T],
    key: impl Fn(&T) -> (String, usize),
) -> Vec<((String, usize), Vec<&T>)> {
    let mut groups: Vec<((String, usize), Vec<&T>)> = Vec::new();
    for r in records {
        let k = key(r);
        match groups.iter_mut().find(|(g, _)| *g == k) {
            Some((_, members)) => members.push(r),
            None => groups.push((k, vec![r])),
        }
    }
    groups
}

fn summarize(
    key: (String, usize),
    metric: &'static str,
    values: &[f64],
    seconds: Option<f64>,
) -> MethodSummary {
    let (mean, se) = mean_and_se(values);
    MethodSummary {
        method: key.0,
        m: key.1,
        metric,
        mean,
        se,
        repeats: values.len(),
        seconds,
    }
}

impl ExperimentReport {
    /// Per-method means in first-appearance order: AUC, then FPR, then loss.
    pub fn summary(&self) -> Vec<MethodSummary> {
        let mut out = Vec::new();
        for (key, rs) in group_by(&self.auc, |r| (r.method.clone(), self.auc_m)) {
            let values: Vec<f64> = rs.iter().map(|r| r.auc).collect();
            let secs = rs.iter().map(|r| r.seconds).sum::<f64>() / rs.len() as f64;
            out.push(summarize(key, "auc", &values, Some(secs)));
        }
        for (key, rs) in group_by(&self.fpr, |r| (r.method.clone(), r.m)) {
            let values: Vec<f64> = rs.iter().map(|r| r.fpr).collect();
            out.push(summarize(key, "fpr", &values, None));
        }
        for (key, rs) in group_by(&self.loss, |r| (r.method.clone(), r.m)) {
            let values: Vec<f64> = rs.iter().map(|r| r.error).collect();
            out.push(summarize(key, "error", &values, None));
        }
        out
    }

    /// Error pooled over all test draws of all repeats, with its binomial
    /// standard error.
    pub fn pooled_loss(&self, method: &str, m: usize) -> Option<(f64, f64)> {
        let (wrong, total) = self
            .loss
            .iter()
            .filter(|r| r.method == method && r.m == m)
            .fold((0usize, 0usize), |(w, t), r| {
                (w + r.misclassified, t + r.total)
            });
        (total > 0).then(|| {
            let p = wrong as f64 / total as f64;
            (p, (p * (1.0 - p) / total as f64).sqrt())
        })
    }

    pub fn mean_auc(&self, method: &str) -> Option<f64> {
        let v: Vec<f64> = self
            .auc
            .iter()
            .filter(|r| r.method == method)
            .map(|r| r.auc)
            .collect();
        (!v.is_empty()).then(|| mean_and_se(&v).0)
    }

    pub fn mean_fpr(&self, method: &str, m: usize) -> Option<f64> {
        let v: Vec<f64> = self
            .fpr
            .iter()
            .filter(|r| r.method == method && r.m == m)
            .map(|r| r.fpr)
            .collect();
        (!v.is_empty()).then(|| mean_and_se(&v).0)
    }
}

fn check_repeats(repeats: usize) -> Result<()> {
    if repeats == 0 {
        return Err(Error::invalid("repeats must be at least 1"));
    }
    Ok(())
}

struct Exp1Repeat {
    auc: Vec<AucRecord>,
    fpr: Vec<FprRecord>,
    roc: Vec<(String, RocCurve)>,
}

/// Vertex recovery: per repeat, one dataset of `m` graphs screened by every
/// method; AUC of the full ranking and FPR of its top `size` vertices.
pub fn run_experiment1(config: &Exp1Config) -> Result<ExperimentReport> {
    check_repeats(config.repeats)?;
    let mixture = IerMixture::experiment1();
    let n = mixture.n();
    if config.size == 0 || config.size > n {
        return Err(Error::invalid(format!("size must lie in 1..={n}")));
    }
    let seeds: Vec<u64> = (0..config.repeats)
        .map(|i| derive_seed(config.seed, i))
        .collect();
    let repeats = seeds
        .par_iter()
        .enumerate()
        .map(|(repeat, &seed)| {
            let ds = mixture.sample(config.m, seed)?;
            let mut out = Exp1Repeat {
                auc: Vec::new(),
                fpr: Vec::new(),
                roc: Vec::new(),
            };
            for method in &config.methods {
                let start = Instant::now();
                let result = method.config().run(&ds)?;
                let seconds = start.elapsed().as_secs_f64();
                let ranking = vertex_ranking(&result);
                let (curve, auc) = roc_auc(&ranking, mixture.signal(), n)?;
                let top = VertexSet::from_unsorted(ranking[..config.size].to_vec());
                out.auc.push(AucRecord {
                    method: method.name(),
                    repeat,
                    auc,
                    seconds,
                });
                out.fpr.push(FprRecord {
                    method: method.name(),
                    m: config.m,
                    repeat,
                    fpr: fpr_at_size(&top, mixture.signal(), n)?,
                });
                if repeat == 0 {
                    out.roc.push((method.name(), curve));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport {
        seeds,
        auc_m: config.m,
        ..Default::default()
    };
    // method-major order keeps each method's repeats together
    for method in &config.methods {
        let name = method.name();
        for r in &repeats {
            report
                .auc
                .extend(r.auc.iter().filter(|a| a.method == name).cloned());
            report
                .fpr
                .extend(r.fpr.iter().filter(|a| a.method == name).cloned());
        }
    }
    report.roc = repeats
        .into_iter()
        .next()
        .map(|r| r.roc)
        .unwrap_or_default();
    Ok(report)
}

pub const BAYES: &str = "Bayes";
pub const PLUGIN_FULL: &str = "Plugin-V";
pub const PLUGIN_TRUE: &str = "Plugin-S";

/// Name of the subgraph plug-in classifier fed by `method`.
pub fn plugin_name(method: &Method) -> String {
    format!("Plugin-{}", method.name())
}

/// Classification: per sample size and repeat, trains on `m` graphs and
/// scores the Bayes rule and the plug-in rule on the whole graph, on the true
/// signal subgraph and on each method's top `size` vertices against a shared
/// set of fresh test graphs.
pub fn run_experiment2(config: &Exp2Config) -> Result<ExperimentReport> {
    check_repeats(config.repeats)?;
    if config.m_grid.is_empty() || config.m_grid.iter().any(|&m| m < 2) {
        return Err(Error::invalid("every sample size must be at least 2"));
    }
    if config.test_draws == 0 {
        return Err(Error::invalid("test draws must be at least 1"));
    }
    let mixture = IerMixture::experiment2();
    let n = mixture.n();
    if config.size == 0 || config.size > n {
        return Err(Error::invalid(format!("size must lie in 1..={n}")));
    }
    let seeds: Vec<u64> = (0..config.repeats)
        .map(|i| derive_seed(config.seed, i))
        .collect();
    let bayes = mixture.bayes();

    // one shared test set per repeat; stream 1 keeps it apart from training
    let tests: Vec<Vec<(AdjacencyMatrix, f64)>> = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1);
            mixture.draw(config.test_draws, &mut rng)
        })
        .collect();

    let cells: Vec<(usize, usize)> = config
        .m_grid
        .iter()
        .flat_map(|&m| (0..config.repeats).map(move |r| (m, r)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(m, repeat)| {
            let ds = mixture.sample(m, seeds[repeat])?;
            let test = &tests[repeat];
            let mut loss = Vec::new();
            let mut fpr = Vec::new();
            let mut record = |name: String, est: crate::classify::LossEstimate| {
                loss.push(LossRecord {
                    method: name,
                    m,
                    repeat,
                    error: est.error,
                    misclassified: est.misclassified,
                    total: est.total,
                });
            };
            record(BAYES.into(), estimate_loss(&bayes, test)?);
            record(
                PLUGIN_FULL.into(),
                estimate_loss(&fit_plugin(&ds, &VertexSet::full(n))?, test)?,
            );
            record(
                PLUGIN_TRUE.into(),
                estimate_loss(&fit_plugin(&ds, mixture.signal())?, test)?,
            );
            for method in &config.methods {
                let selected = method
                    .config()
                    .with_size_rule(SizeRule::Fixed(config.size))
                    .run(&ds)?
                    .selected;
                fpr.push(FprRecord {
                    method: method.name(),
                    m,
                    repeat,
                    fpr: fpr_at_size(&selected, mixture.signal(), n)?,
                });
                record(
                    plugin_name(method),
                    estimate_loss(&fit_plugin(&ds, &selected)?, test)?,
                );
            }
            Ok((loss, fpr))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport {
        seeds,
        ..Default::default()
    };
    for (loss, fpr) in results {
        report.loss.extend(loss);
        report.fpr.extend(fpr);
    }
    // method, then m, then repeat
    let order = |name: &str| -> usize {
        match name {
            BAYES => 0,
            PLUGIN_FULL => 1,
            PLUGIN_TRUE => 2,
            other => {
                3 + config
                    .methods
                    .iter()
                    .position(|mth| plugin_name(mth) == other || mth.name() == other)
                    .unwrap_or(0)
            }
        }
    };
    report
        .loss
        .sort_by_key(|r| (order(&r.method), r.m, r.repeat));
    report
        .fpr
        .sort_by_key(|r| (order(&r.method), r.m, r.repeat));
    Ok(report)
}
