//! Library side of the `lifelog` binary: command-line surface, config
//! resolution, and the end-to-end pipelines, exposed so integration tests
//! can drive them in-process.

/// Prints a line to stdout, ignoring a closed pipe (`lifelog ... | head`).
#[macro_export]
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod pipeline;

use cli::{Cli, Command};
use error::CliResult;

/// Dispatches a parsed command line.
pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Generate(args) => commands::cmd_generate(cli, args),
        Command::Split(args) => commands::cmd_split(cli, args),
        Command::TrainEnsemble(args) => commands::cmd_train_ensemble(cli, args),
        Command::TrainTemporal(args) => commands::cmd_train_temporal(cli, args),
        Command::SweepTrees(args) => commands::cmd_sweep_trees(cli, args),
        Command::Evaluate(args) => commands::cmd_evaluate(cli, args),
        Command::DumpModel(args) => commands::cmd_dump_model(cli, args),
    }
}
