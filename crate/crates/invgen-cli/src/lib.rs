//! Experiment harness for the `invgen` library.
//!
//! Every command takes a single `--seed`; with the same seed and inputs a
//! command writes byte-identical files. Reports are JSON documents carrying
//! `"schema": 1` and the raw counts behind every derived number. Wall-clock
//! timings go to a separate `timings.json` so that reports stay reproducible.

mod commands;
mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::run;
pub use report::{recompute_tv_from_counts, Timings, TvSection, SCHEMA};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] invgen::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// 0 success, 2 input error, 3 algorithmic failure, 4 capacity.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_input_error() => 2,
            CliError::Lib(e) if e.is_capacity_error() => 4,
            CliError::Lib(_) => 3,
            CliError::Io { .. } | CliError::Usage(_) => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "invgen", version, about = "Inverse approximate uniform generation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassName {
    Ltf,
    Dnf,
    Kdnf,
}

#[derive(Clone, Debug, Args, serde::Serialize)]
pub struct ClassArgs {
    #[arg(long, value_enum)]
    pub class: ClassName,
    /// Number of terms (dnf) or planted terms (kdnf).
    #[arg(long)]
    pub s: Option<usize>,
    /// Term width bound (kdnf).
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plant a function and write exact-uniform positive samples.
    Gen(GenArgs),
    /// Learn a sampler from a positive-sample file.
    Invert(InvertArgs),
    /// Measure a saved sampler's distance to the uniform distribution on a function's support.
    Eval(EvalArgs),
    /// Approximate the satisfying fraction of a function.
    Count(CountArgs),
    /// Draw uniform satisfying assignments of a function.
    Sample(SampleArgs),
    /// Sample a graph's automorphism group by a walk on sampled generators.
    Graphauto(GraphautoArgs),
}

#[derive(Debug, Args, serde::Serialize)]
pub struct GenArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of positive samples.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Plant this function instead of a random one.
    #[arg(long)]
    pub function: Option<PathBuf>,
    /// Output directory; receives function.json and samples.txt.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct InvertArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Positive-sample file, one 0/1 string per line.
    #[arg(long)]
    pub samples: PathBuf,
    /// The planted function, used only to fill in the TV section.
    #[arg(long)]
    pub function: Option<PathBuf>,
    /// JSON file overriding the work caps.
    #[arg(long)]
    pub budget: Option<PathBuf>,
    /// Sampler draws for the empirical TV estimate.
    #[arg(long, default_value_t = 100_000)]
    pub draws: u64,
    #[arg(long, default_value_t = 0.25)]
    pub tv_threshold: f64,
    /// Output directory; receives report.json, sampler.json and timings.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct EvalArgs {
    /// A sampler.json written by `invert`.
    #[arg(long)]
    pub sampler: PathBuf,
    #[arg(long)]
    pub function: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pub draws: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.25)]
    pub tv_threshold: f64,
    /// Enumerate the support (default when the dimension allows it).
    #[arg(long, conflicts_with = "empirical")]
    pub exact: bool,
    /// Compare against draws from an exact sampler instead of enumerating.
    #[arg(long)]
    pub empirical: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct CountArgs {
    #[arg(long)]
    pub function: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub function: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub draws: u64,
    #[arg(long, default_value_t = 1e-6)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct GraphautoArgs {
    /// Graph file: vertex count, then one `u v` edge per line.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0.02)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.02)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub draws: u64,
    #[arg(long, default_value_t = 0.05)]
    pub tv_threshold: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
