//! Command-line front end for the gait toolkit.
//!
//! Every subcommand reads JSON/CSV inputs, writes its artifacts into the
//! output directory and maps failures onto exit codes: 0 success, 1 invalid
//! input or usage, 2 no feasible gait, 3 simulation failure.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod render;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

use args::{Cli, Command};
use commands::Context;
use config::ProjectConfig;
use error::{CliError, EXIT_INPUT, EXIT_OK};

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e);
            e.exit_code()
        }
    }
}

fn context(cli: &Cli) -> Result<Context, CliError> {
    let project = match &cli.config {
        Some(p) => ProjectConfig::load(p)?,
        None => ProjectConfig::default(),
    };
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| project.outputs.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let l_max = cli.l_max.unwrap_or(project.planner.l_max);
    if l_max == 0 {
        return Err(CliError::input("--l-max must be at least 1"));
    }
    Ok(Context {
        seed: cli.seed.or(project.seed).unwrap_or(0),
        sense: cli.sense.unwrap_or(project.planner.sense),
        l_max,
        out_dir,
        project_path: cli.config.clone(),
        project,
    })
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let ctx = context(&cli)?;
    match &cli.command {
        Command::Simulate(a) => commands::simulate(&ctx, a),
        Command::Learn(a) => commands::learn(&ctx, a),
        Command::Plan(a) => commands::plan(&ctx, a),
        Command::Gait(a) => commands::gait(&ctx, a),
        Command::Validate(a) => commands::validate_file(&ctx, a),
    }
}
