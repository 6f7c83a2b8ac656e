//! Command-line flags and `--config` files.
//!
//! A config file holds `key=value` lines named after the long flags (`-` and
//! `_` are interchangeable, `#` starts a comment). Flags given on the command
//! line win over file values.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sigscreen::eval::{Grouping, Method};
use sigscreen::{ScreenConfig, SizeRule, Statistic};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "sigscreen",
    version,
    about = "Signal subgraph screening for labeled graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a dataset from a named generator.
    Simulate(Opts),
    /// Screen the vertices of a dataset.
    Screen(Opts),
    /// Cross-validate a screening plus classification pipeline.
    Classify(Opts),
    /// Rerun a simulation experiment and write its report.
    Replicate {
        /// exp1 or exp2; `--experiment` also works.
        #[arg(value_name = "EXPERIMENT")]
        name: Option<String>,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SizeRuleArg {
    Maxcorr,
    Gap,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifierArg {
    Plugin,
    Knn,
    Bayes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupArg {
    None,
    Subject,
}

impl From<GroupArg> for Grouping {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::None => Grouping::None,
            GroupArg::Subject => Grouping::Subject,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// Edge list CSV (graph_id,u,v,weight).
    #[arg(long)]
    pub graphs: Option<PathBuf>,
    /// Label CSV (graph_id,label[,subject_id]).
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Vertex count; inferred from the edge list when omitted.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse_with::<Statistic>)]
    pub stat: Option<Statistic>,
    #[arg(long)]
    pub iterative: bool,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Select exactly this many vertices.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long, value_enum)]
    pub size_rule: Option<SizeRuleArg>,
    #[arg(long, value_enum)]
    pub classifier: Option<ClassifierArg>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum)]
    pub group: Option<GroupArg>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// File of key=value defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Generator name (exp1 or exp2).
    #[arg(long)]
    pub experiment: Option<String>,
    /// Number of graphs to sample.
    #[arg(long)]
    pub m: Option<usize>,
    /// Comma-separated sample sizes for exp2.
    #[arg(long, value_delimiter = ',')]
    pub m_grid: Option<Vec<usize>>,
    /// Monte-Carlo test graphs per exp2 repeat.
    #[arg(long)]
    pub test_draws: Option<usize>,
    /// Comma-separated screening methods, e.g. dcorr,itdcorr-0.5,rv.
    #[arg(long, value_delimiter = ',', value_parser = parse_with::<Method>)]
    pub methods: Option<Vec<Method>>,
}

fn parse_with<T: FromStr<Err = sigscreen::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: sigscreen::Error| e.to_string())
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Validation(format!("config key {key}: {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(|v| parse_value(key, v.trim()))
        .collect()
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T, CliError> {
    T::from_str(value, true).map_err(|e| CliError::Validation(format!("config key {key}: {e}")))
}

fn fill<T>(
    slot: &mut Option<T>,
    value: impl FnOnce() -> Result<T, CliError>,
) -> Result<(), CliError> {
    if slot.is_none() {
        *slot = Some(value()?);
    }
    Ok(())
}

impl Opts {
    /// Fills unset options from the `--config` file, if any.
    pub fn merge_config(mut self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!("{}:{}: expected key=value", path.display(), i + 1))
            })?;
            self.apply(&key.trim().replace('_', "-"), value.trim(), &path)?;
        }
        Ok(self)
    }

    fn apply(&mut self, key: &str, v: &str, path: &Path) -> Result<(), CliError> {
        let rel = |p: &str| {
            let p = PathBuf::from(p);
            match path.parent() {
                Some(dir) if p.is_relative() => dir.join(p),
                _ => p,
            }
        };
        match key {
            "graphs" => fill(&mut self.graphs, || Ok(rel(v))),
            "labels" => fill(&mut self.labels, || Ok(rel(v))),
            "out" => fill(&mut self.out, || Ok(rel(v))),
            "n" => fill(&mut self.n, || parse_value(key, v)),
            "stat" => fill(&mut self.stat, || parse_value(key, v)),
            "iterative" => {
                self.iterative |= parse_value::<bool>(key, v)?;
                Ok(())
            }
            "delta" => fill(&mut self.delta, || parse_value(key, v)),
            "threshold" => fill(&mut self.threshold, || parse_value(key, v)),
            "size" => fill(&mut self.size, || parse_value(key, v)),
            "size-rule" => fill(&mut self.size_rule, || parse_enum(key, v)),
            "classifier" => fill(&mut self.classifier, || parse_enum(key, v)),
            "k" => fill(&mut self.k, || parse_value(key, v)),
            "group" => fill(&mut self.group, || parse_enum(key, v)),
            "repeats" => fill(&mut self.repeats, || parse_value(key, v)),
            "seed" => fill(&mut self.seed, || parse_value(key, v)),
            "threads" => fill(&mut self.threads, || parse_value(key, v)),
            "experiment" => fill(&mut self.experiment, || Ok(v.to_string())),
            "m" => fill(&mut self.m, || parse_value(key, v)),
            "m-grid" => fill(&mut self.m_grid, || parse_list(key, v)),
            "test-draws" => fill(&mut self.test_draws, || parse_value(key, v)),
            "methods" => fill(&mut self.methods, || parse_list(key, v)),
            other => Err(CliError::Validation(format!(
                "{}: unknown config key {other:?}",
                path.display()
            ))),
        }
    }

    /// True when any screening option was given.
    pub fn wants_screening(&self) -> bool {
        self.stat.is_some()
            || self.iterative
            || self.delta.is_some()
            || self.threshold.is_some()
            || self.size.is_some()
            || self.size_rule.is_some()
    }

    pub fn screen_config(&self) -> Result<ScreenConfig, CliError> {
        let stat = self.stat.unwrap_or_default();
        let mut config = if self.iterative {
            if self.threshold.is_some() {
                return Err(invalid("--threshold applies to one-shot screening only"));
            }
            let delta = self.delta.unwrap_or(0.5);
            if !(delta > 0.0 && delta < 1.0) {
                return Err(invalid(format!("--delta must lie in (0, 1), got {delta}")));
            }
            ScreenConfig::iterative(stat, delta)
        } else {
            if self.delta.is_some() {
                return Err(invalid("--delta needs --iterative"));
            }
            let c = self.threshold.unwrap_or(0.0);
            if !(0.0..=1.0).contains(&c) {
                return Err(invalid(format!("--threshold must lie in [0, 1], got {c}")));
            }
            ScreenConfig::one_shot(stat, c)
        };
        let rule = match (self.size_rule, self.size) {
            (None, None) => None,
            (None | Some(SizeRuleArg::Fixed), Some(k)) => Some(SizeRule::Fixed(k)),
            (Some(SizeRuleArg::Fixed), None) => {
                return Err(invalid("--size-rule fixed needs --size"));
            }
            (Some(_), Some(_)) => {
                return Err(invalid("--size only combines with --size-rule fixed"));
            }
            (Some(SizeRuleArg::Gap), None) => Some(SizeRule::Gap),
            (Some(SizeRuleArg::Maxcorr), None) => {
                if !self.iterative {
                    return Err(invalid("--size-rule maxcorr needs --iterative"));
                }
                Some(SizeRule::MaxCorr)
            }
        };
        if let Some(SizeRule::Fixed(0)) = rule {
            return Err(invalid("--size must be at least 1"));
        }
        if let Some(rule) = rule {
            config = config.with_size_rule(rule);
        }
        Ok(config)
    }

    pub fn positive(
        &self,
        name: &str,
        value: Option<usize>,
        default: usize,
    ) -> Result<usize, CliError> {
        match value.unwrap_or(default) {
            0 => Err(invalid(format!("--{name} must be at least 1"))),
            v => Ok(v),
        }
    }
}

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}
