//! `mriqa` command-line front end.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 metric precondition
//! violated (image too small, mismatched shapes), 4 some batch rows failed.

mod commands;
mod common;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mriqa", version, about = "MRI image quality metrics and degradation tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score one reference/distorted pair.
    Compute(commands::compute::Args),
    /// Score every pair of a manifest.
    Batch(commands::batch::Args),
    /// Simulate acceleration, motion or noise artefacts.
    Degrade(commands::degrade::Args),
    /// Correlate metric scores with rater votes.
    Eval(commands::eval::Args),
    /// Choose the items to send for labelling.
    Select(commands::select::Args),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Compute(a) => commands::compute::run(a),
        Command::Batch(a) => commands::batch::run(a),
        Command::Degrade(a) => commands::degrade::run(a),
        Command::Eval(a) => commands::eval::run(a),
        Command::Select(a) => commands::select::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mriqa: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
