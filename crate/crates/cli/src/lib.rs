//! Command-line driver for the `contrace` solver: problem files, subcommands
//! and result files.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 on numerical failure.

use std::ffi::OsString;

use clap::Parser;

pub mod args;
pub mod commands;
pub mod config;
pub mod output;
pub mod problem;

use args::{Cli, Command};
use commands::RunKind;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => commands::cmd_run(RunKind::Solve, a, None),
        Command::Beyn(a) => commands::cmd_run(RunKind::Beyn, &a.run, a.probe_width),
        Command::Repv(a) => commands::cmd_run(RunKind::Repv, a, None),
        Command::Count(a) => commands::cmd_count(a),
        Command::Roots(a) => commands::cmd_roots(a),
        Command::Replay(a) => commands::cmd_replay(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
