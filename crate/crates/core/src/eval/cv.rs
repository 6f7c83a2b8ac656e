//! Cross-validated screening-plus-classification pipelines.

use rayon::prelude::*;

use crate::classify::{fit_plugin, BayesClassifier, GraphClassifier, KnnClassifier, LossEstimate};
use crate::error::{Error, Result};
use crate::graph::{LabeledGraphDataset, VertexSet};
use crate::screen::ScreenConfig;

/// Vertex set handed to the classifier in every fold.
#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    Full,
    Fixed(VertexSet),
    /// Screening re-run on each fold's training graphs.
    Screen(ScreenConfig),
}

#[derive(Debug, Clone)]
pub enum ClassifierSpec {
    Plugin,
    Knn {
        k: usize,
    },
    /// Known model; nothing is fitted and the selection is ignored.
    Bayes(BayesClassifier),
}

#[derive(Debug, Clone)]
pub struct PipelineSpec {
    pub selection: Selection,
    pub classifier: ClassifierSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Grouping {
    /// Leave one graph out.
    #[default]
    None,
    /// Leave one subject's graphs out.
    Subject,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldRecord {
    /// Subject id, or the graph id for leave-one-out.
    pub name: String,
    pub held_out: Vec<usize>,
    pub selected: VertexSet,
    /// Predicted label per held-out graph.
    pub predictions: Vec<f64>,
    /// Some held-out label never occurs in the training graphs.
    pub unseen_class: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub folds: Vec<FoldRecord>,
    pub loss: LossEstimate,
}

fn folds(ds: &LabeledGraphDataset, grouping: Grouping) -> Result<Vec<(String, Vec<usize>)>> {
    match grouping {
        Grouping::None => Ok(ds
            .graph_ids()
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), vec![i]))
            .collect()),
        Grouping::Subject => {
            let subjects = ds
                .subject_ids()
                .ok_or_else(|| Error::invalid("subject grouping needs subject ids"))?;
            let mut out: Vec<(String, Vec<usize>)> = Vec::new();
            for (i, s) in subjects.iter().enumerate() {
                match out.iter_mut().find(|(name, _)| name == s) {
                    Some((_, members)) => members.push(i),
                    None => out.push((s.clone(), vec![i])),
                }
            }
            Ok(out)
        }
    }
}

fn run_fold(
    ds: &LabeledGraphDataset,
    spec: &PipelineSpec,
    name: String,
    held_out: Vec<usize>,
) -> Result<FoldRecord> {
    let train_idx: Vec<usize> = (0..ds.len()).filter(|i| !held_out.contains(i)).collect();
    if train_idx.is_empty() {
        return Err(Error::invalid("a fold leaves no training graphs"));
    }
    let train = ds.subset(&train_idx);
    let selected = match &spec.selection {
        Selection::Full => VertexSet::full(ds.n()),
        Selection::Fixed(set) => {
            set.check_within(ds.n())?;
            set.clone()
        }
        Selection::Screen(config) => {
            if train.len() < 2 {
                return Err(Error::invalid("screening needs at least 2 training graphs"));
            }
            config.run(&train)?.selected
        }
    };
    let classifier: Box<dyn GraphClassifier> = match &spec.classifier {
        ClassifierSpec::Plugin => Box::new(fit_plugin(&train, &selected)?),
        ClassifierSpec::Knn { k } => Box::new(KnnClassifier::fit(&train, *k, &selected)?),
        ClassifierSpec::Bayes(b) => Box::new(b.clone()),
    };
    let classes = train.classes();
    let mut unseen_class = false;
    let mut predictions = Vec::with_capacity(held_out.len());
    for &i in &held_out {
        unseen_class |= !classes.contains(&ds.labels()[i]);
        predictions.push(classifier.predict(&ds.graphs()[i])?);
    }
    Ok(FoldRecord {
        name,
        held_out,
        selected,
        predictions,
        unseen_class,
    })
}

/// Holds out each fold in turn, screens and fits on the remaining graphs and
/// predicts the held-out ones. Only training labels reach screening and
/// fitting.
pub fn cross_validate(
    ds: &LabeledGraphDataset,
    spec: &PipelineSpec,
    grouping: Grouping,
) -> Result<CvReport> {
    let folds = folds(ds, grouping)?;
    if folds.len() < 2 {
        return Err(Error::invalid("cross-validation needs at least 2 folds"));
    }
    let records = folds
        .into_par_iter()
        .map(|(name, held_out)| run_fold(ds, spec, name, held_out))
        .collect::<Result<Vec<_>>>()?;
    let pairs = records
        .iter()
        .flat_map(|f| {
            f.held_out
                .iter()
                .zip(&f.predictions)
                .map(|(&i, &p)| (ds.labels()[i], p))
        })
        .collect();
    let loss = LossEstimate::from_predictions(pairs, records.len())?;
    Ok(CvReport {
        folds: records,
        loss,
    })
}
