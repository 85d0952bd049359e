use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gaitmatrix::estimator::Aggregation;

use crate::config::Direction;

#[derive(Debug, Parser)]
#[command(
    name = "gaitmatrix",
    version,
    about = "Simulate, learn and plan friction-switching gaits"
)]
pub struct Cli {
    /// Project configuration (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory for written artifacts [default: out].
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Seed for randomized utilities such as trial noise.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Longest periodic sequence considered by the planner [default: 4].
    #[arg(long, global = true, value_name = "N")]
    pub l_max: Option<usize>,
    /// Direction of travel to optimize [default: forward].
    #[arg(long, global = true, value_enum)]
    pub sense: Option<Direction>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a reward matrix from a body model.
    Simulate(SimulateArgs),
    /// Estimate a reward matrix from a trial log.
    Learn(LearnArgs),
    /// Find the optimal periodic gait of a reward matrix.
    Plan(PlanArgs),
    /// Run a gait closed loop on a simulated body.
    Gait(GaitArgs),
    /// Check a matrix, body or project file.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Body configuration; falls back to the project's body.
    pub body: Option<PathBuf>,
    /// Trials written per transition.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// Standard deviation of Gaussian noise added to written trials, mm.
    #[arg(long, default_value_t = 0.0)]
    pub noise_mm: f64,
    #[arg(long)]
    pub substeps: Option<usize>,
    /// Discretization deadband, mm.
    #[arg(long)]
    pub deadband: Option<f64>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum AggregationArg {
    Median,
    Majority,
}

impl From<AggregationArg> for Aggregation {
    fn from(a: AggregationArg) -> Self {
        match a {
            AggregationArg::Median => Aggregation::Median,
            AggregationArg::Majority => Aggregation::Majority,
        }
    }
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    /// Trial log CSV; falls back to the project's trials.
    pub trials: Option<PathBuf>,
    /// Number of robot states [default: 4].
    #[arg(long)]
    pub states: Option<usize>,
    #[arg(long, value_enum)]
    pub aggregation: Option<AggregationArg>,
    /// Recency half-life, seconds.
    #[arg(long)]
    pub halflife: Option<f64>,
    #[arg(long)]
    pub min_trials: Option<usize>,
    /// Discretization deadband, mm.
    #[arg(long)]
    pub deadband: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Reward matrix; falls back to the project's matrix, trials or body.
    pub matrix: Option<PathBuf>,
    /// Also report the best reward-per-transition cycle.
    #[arg(long)]
    pub mean: bool,
    /// Also report the best reward-per-second cycle.
    #[arg(long)]
    pub rate: bool,
    /// Per-transition durations in ms as a JSON n×n array.
    #[arg(long, value_name = "FILE")]
    pub durations: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GaitArgs {
    /// Body configuration; falls back to the project's body.
    pub body: Option<PathBuf>,
    /// State sequence such as "(00),(10),(01),(00)"; planned when absent.
    #[arg(long)]
    pub sequence: Option<String>,
    /// Gait cycles to run.
    #[arg(long)]
    pub cycles: Option<usize>,
    /// Controller period, ms.
    #[arg(long)]
    pub tick_ms: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// File to check; falls back to the project file.
    pub file: Option<PathBuf>,
}
