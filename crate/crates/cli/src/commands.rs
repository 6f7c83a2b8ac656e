use std::path::{Path, PathBuf};

use sigscreen::eval::{
    auc_csv, cv_loss_csv, fpr_csv, loss_csv, predictions_csv, roc_csv, screening_csv, summary_csv,
    summary_table, write_report_file, ClassifierSpec, Exp1Config, Exp2Config, Grouping,
    PipelineSpec, Selection,
};
use sigscreen::graph::{read_dataset, write_dataset, GRAPHS_FILE, LABELS_FILE};
use sigscreen::{
    cross_validate, run_experiment1, run_experiment2, IerMixture, LabeledGraphDataset,
};

use crate::opts::{invalid, ClassifierArg, Opts};
use crate::CliError;

fn out_dir(opts: &Opts) -> PathBuf {
    opts.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn load(opts: &Opts) -> Result<LabeledGraphDataset, CliError> {
    let graphs = opts
        .graphs
        .as_deref()
        .ok_or_else(|| invalid("--graphs is required"))?;
    let labels = opts
        .labels
        .as_deref()
        .ok_or_else(|| invalid("--labels is required"))?;
    if opts.n == Some(0) {
        return Err(invalid("--n must be at least 1"));
    }
    Ok(read_dataset(graphs, labels, opts.n)?)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    Ok(write_report_file(dir, name, contents)?)
}

fn mixture(opts: &Opts) -> Result<IerMixture, CliError> {
    Ok(IerMixture::by_name(
        opts.experiment.as_deref().unwrap_or("exp1"),
    )?)
}

pub fn simulate(opts: &Opts) -> Result<(), CliError> {
    let m = opts.positive("m", opts.m, 100)?;
    let ds = mixture(opts)?.sample(m, opts.seed.unwrap_or(1))?;
    let dir = out_dir(opts);
    write_dataset(&ds, &dir)?;
    println!(
        "wrote {m} graphs on {} vertices to {} and {}",
        ds.n(),
        dir.join(GRAPHS_FILE).display(),
        dir.join(LABELS_FILE).display()
    );
    Ok(())
}

pub fn screen(opts: &Opts) -> Result<(), CliError> {
    let ds = load(opts)?;
    let result = opts.screen_config()?.run(&ds)?;
    let dir = out_dir(opts);
    write(&dir, "screening.csv", &screening_csv(&result, &ds))?;
    let names: Vec<String> = result.selected.iter().map(|&u| ds.vertex_name(u)).collect();
    println!(
        "selected {} of {} vertices: {}",
        names.len(),
        ds.n(),
        names.join(" ")
    );
    Ok(())
}

pub fn classify(opts: &Opts) -> Result<(), CliError> {
    let ds = load(opts)?;
    let classifier = match opts.classifier.unwrap_or(ClassifierArg::Plugin) {
        ClassifierArg::Plugin => ClassifierSpec::Plugin,
        ClassifierArg::Knn => ClassifierSpec::Knn {
            k: opts.positive("k", opts.k, 1)?,
        },
        ClassifierArg::Bayes => {
            if opts.experiment.is_none() {
                return Err(invalid(
                    "--classifier bayes needs --experiment naming the generator",
                ));
            }
            let model = mixture(opts)?;
            if model.n() != ds.n() {
                return Err(invalid(format!(
                    "generator has {} vertices, dataset has {}",
                    model.n(),
                    ds.n()
                )));
            }
            ClassifierSpec::Bayes(model.bayes())
        }
    };
    let selection = if opts.wants_screening() {
        Selection::Screen(opts.screen_config()?)
    } else {
        Selection::Full
    };
    let grouping = opts.group.map_or(Grouping::None, Grouping::from);
    let report = cross_validate(
        &ds,
        &PipelineSpec {
            selection,
            classifier,
        },
        grouping,
    )?;
    let dir = out_dir(opts);
    write(&dir, "predictions.csv", &predictions_csv(&report, &ds))?;
    write(&dir, "loss.csv", &cv_loss_csv(&report))?;
    let l = &report.loss;
    println!(
        "folds {}  error {:.4}  se {:.4}  ({} of {} misclassified)",
        l.folds, l.error, l.standard_error, l.misclassified, l.total
    );
    Ok(())
}

pub fn replicate(experiment: Option<&str>, opts: &Opts) -> Result<(), CliError> {
    let name = experiment
        .or(opts.experiment.as_deref())
        .ok_or_else(|| invalid("name an experiment: exp1 or exp2"))?;
    if opts.repeats == Some(0) {
        return Err(invalid("--repeats must be at least 1"));
    }
    let dir = out_dir(opts);
    let report = match name {
        "exp1" => {
            let mut config = Exp1Config::default();
            config.m = opts.positive("m", opts.m, config.m)?;
            config.repeats = opts.repeats.unwrap_or(config.repeats);
            config.seed = opts.seed.unwrap_or(config.seed);
            config.size = opts.positive("size", opts.size, config.size)?;
            if let Some(methods) = &opts.methods {
                config.methods = methods.clone();
            }
            let report = run_experiment1(&config)?;
            write(&dir, "auc.csv", &auc_csv(&report))?;
            write(&dir, "fpr.csv", &fpr_csv(&report))?;
            write(&dir, "roc.csv", &roc_csv(&report))?;
            report
        }
        "exp2" => {
            let mut config = Exp2Config::default();
            if let Some(grid) = &opts.m_grid {
                if grid.contains(&0) {
                    return Err(invalid("--m-grid entries must be at least 1"));
                }
                config.m_grid = grid.clone();
            }
            config.repeats = opts.repeats.unwrap_or(config.repeats);
            config.seed = opts.seed.unwrap_or(config.seed);
            config.test_draws = opts.positive("test-draws", opts.test_draws, config.test_draws)?;
            config.size = opts.positive("size", opts.size, config.size)?;
            if let Some(methods) = &opts.methods {
                config.methods = methods.clone();
            }
            let report = run_experiment2(&config)?;
            write(&dir, "loss.csv", &loss_csv(&report))?;
            write(&dir, "fpr.csv", &fpr_csv(&report))?;
            report
        }
        other => {
            return Err(invalid(format!(
                "unknown experiment {other:?}; use exp1 or exp2"
            )))
        }
    };
    let summary = report.summary();
    write(&dir, "summary.csv", &summary_csv(&summary))?;
    print!("{}", summary_table(&summary));
    Ok(())
}
