//! Problem files, the command surface and JSON reports.
//!
//! Exit codes: 0 success, 1 input validation, 2 a check failed,
//! 3 degenerate or non-regular Lagrangian.

mod commands;
mod input;
mod report;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

pub use commands::{run, Command, RunOptions, DEFAULT_TOLERANCES};
pub use input::{parse_point_file, HddBlock, ProblemFile};
pub use report::{exit_code_for, Check, CheckKind, ProblemDigest, Report, Timing};
pub use report::{EXIT_CHECK, EXIT_DEGENERATE, EXIT_INPUT, EXIT_OK};

use crate::error::{Error, Result};
use crate::numerics::Exec;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExecArg {
    Parallel,
    Sequential,
}

/// Jet-bundle variational calculus from problem files.
#[derive(Debug, Parser)]
#[command(name = "jetvar", version, about)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Problem file (TOML).
    pub file: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Override a tolerance, e.g. `--tol residual=1e-8`.
    #[arg(long = "tol", value_name = "KEY=VAL")]
    pub tol: Vec<String>,
    /// Point file with `coordinate = value` lines.
    #[arg(long, value_name = "POINTFILE")]
    pub at: Option<PathBuf>,
    /// Initial values for hdd-solve, same format as --at.
    #[arg(long, value_name = "INITFILE")]
    pub init: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x1: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Grid points per axis.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Evaluation strategy for grids and sampling.
    #[arg(long, value_enum)]
    pub exec: Option<ExecArg>,
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn options(args: &Args, file: &ProblemFile) -> Result<RunOptions> {
    let mut tolerances = std::collections::BTreeMap::new();
    for t in &args.tol {
        let (k, v) = t.split_once('=').ok_or_else(|| Error::Invalid(format!("--tol expects KEY=VAL, got {t:?}")))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::Invalid(format!("--tol {k}: {v:?} is not a number")))?;
        tolerances.insert(k.trim().to_string(), v);
    }
    let point = |p: &Option<PathBuf>| p.as_ref().map(|p| parse_point_file(&read(p)?, &file.problem)).transpose();
    Ok(RunOptions {
        at: point(&args.at)?,
        init: point(&args.init)?,
        x0: args.x0,
        x1: args.x1,
        step: args.step,
        resolution: args.resolution,
        tolerances,
        exec: match args.exec {
            Some(ExecArg::Sequential) => Exec::Sequential,
            Some(ExecArg::Parallel) => Exec::Parallel,
            None => Exec::default(),
        },
    })
}

/// Parses the file, runs the command and renders the report.
pub fn execute(args: &Args) -> Report {
    let prepared = read(&args.file).and_then(|t| ProblemFile::parse(&t)).and_then(|f| {
        let o = options(args, &f)?;
        Ok((f, o))
    });
    match prepared {
        Ok((file, opts)) => run(args.command, &file, &opts),
        Err(e) => {
            let mut rep = Report::new(args.command.name());
            rep.fail(&e);
            rep
        }
    }
}

pub fn render(rep: &Report, format: Format) -> String {
    match format {
        Format::Json => rep.to_json() + "\n",
        Format::Text => rep.to_text(),
    }
}
