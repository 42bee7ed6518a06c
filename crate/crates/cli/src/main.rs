//! `superteach` command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage or input errors, 2 for runtime
//! failures such as solver non-convergence or unwritable output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<superteach::Error> for Failure {
    fn from(e: superteach::Error) -> Self {
        Failure {
            code: if e.is_usage() { 1 } else { 2 },
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "superteach",
    version,
    about = "Select training subsets that teach a known target better than the full sample"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a synthetic data set and write it as CSV.
    Gen(GenArgs),
    /// Run a teacher on a data set and report the selected subset as JSON.
    Teach(TeachArgs),
    /// Run repeated trials over a grid of sample sizes or dimensions.
    Experiment(ExperimentArgs),
    /// Fit log-log convergence rates to a results CSV.
    Rates(RatesArgs),
    /// Compare the large-margin tail probability with Monte Carlo.
    Tail(TailArgs),
}

/// Flags describing the task distribution and target.
#[derive(Debug, Args)]
pub struct TaskArgs {
    /// gauss1d, margin1d, halfspace (alias logistic), linreg (alias ridge),
    /// interval or consistent.
    #[arg(long)]
    pub task: String,
    /// Target parameter, comma separated (interval ends for `consistent`).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta_star: Option<Vec<f64>>,
    /// Label noise variance for linreg.
    #[arg(long)]
    pub noise_var: Option<f64>,
    /// Regularization weight of the ERM learners.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Integer grid `lo,hi` for the consistent task.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub domain: Option<Vec<i64>>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub task: TaskArgs,
    #[arg(long)]
    pub n: usize,
    /// Dimension for halfspace and linreg (default 2).
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Flags selecting the teacher and, for `search`, its engine.
#[derive(Debug, Args)]
pub struct TeacherArgs {
    /// identity, bk, bms or search.
    #[arg(long)]
    pub teacher: String,
    /// Subset size for `bk` and `--strategy fixed-k`.
    #[arg(long)]
    pub k: Option<usize>,
    /// exhaustive, fixed-k, greedy or local-swap.
    #[arg(long, default_value = "exhaustive")]
    pub strategy: String,
    /// Learner override; defaults to the task's learner.
    #[arg(long)]
    pub learner: Option<String>,
    /// Largest n accepted by exhaustive search.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Evaluation budget for fixed-size enumeration.
    #[arg(long)]
    pub budget: Option<u128>,
    /// Move limit per local-swap descent (default 50·n).
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Random restarts for local-swap.
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TeachArgs {
    #[command(flatten)]
    pub task: TaskArgs,
    #[command(flatten)]
    pub teacher: TeacherArgs,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write `PREFIX_points.csv` and `PREFIX_lines.csv` for plotting.
    #[arg(long)]
    pub emit_plot: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub task: TaskArgs,
    #[command(flatten)]
    pub teacher: TeacherArgs,
    /// Sample sizes to sweep, strictly increasing.
    #[arg(long, value_delimiter = ',', conflicts_with = "d_list")]
    pub n_list: Option<Vec<usize>>,
    /// Dimensions to sweep at fixed `--n`, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    pub d_list: Option<Vec<usize>>,
    /// Sample size for a dimension sweep.
    #[arg(long)]
    pub n: Option<usize>,
    /// Dimension for a sample-size sweep of halfspace or linreg (default 2).
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Results CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Medians CSV in the `n_or_d,median_ratio,...` layout.
    #[arg(long)]
    pub medians: Option<PathBuf>,
    /// Write wall-clock columns as 0 so reruns are byte-identical.
    #[arg(long)]
    pub omit_timing: bool,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    /// Results CSV with columns n, risk_full and risk_subset.
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Gen(args) => commands::gen(args),
        Command::Teach(args) => commands::teach(args),
        Command::Experiment(args) => commands::experiment(args),
        Command::Rates(args) => commands::rates(args),
        Command::Tail(args) => commands::tail(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
