//! `sigscreen` command-line tool.
//!
//! Exit codes: 0 success, 1 invalid input or configuration, 2 file system
//! failure, 3 internal error.

mod commands;
mod opts;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use opts::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] sigscreen::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io { .. } => 2,
            CliError::Core(e) if e.is_io() => 2,
            CliError::Core(sigscreen::Error::Fit(_)) | CliError::Internal(_) => 3,
            CliError::Core(_) => 1,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (command, opts) = match cli.command {
        Command::Simulate(o) => ("simulate", o),
        Command::Screen(o) => ("screen", o),
        Command::Classify(o) => ("classify", o),
        Command::Replicate { name, opts } => {
            let opts = opts.merge_config()?;
            return with_threads(&opts, || commands::replicate(name.as_deref(), &opts));
        }
    };
    let opts = opts.merge_config()?;
    with_threads(&opts, || match command {
        "simulate" => commands::simulate(&opts),
        "screen" => commands::screen(&opts),
        _ => commands::classify(&opts),
    })
}

fn with_threads<T: Send>(
    opts: &opts::Opts,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    let Some(threads) = opts.threads else {
        return f();
    };
    if threads == 0 {
        return Err(opts::invalid("--threads must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?
        .install(f)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(3),
    }
}
