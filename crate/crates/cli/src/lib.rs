//! Command-line front end for `lp-projection`.
//!
//! Exit codes: 0 success, 1 property or witness failure, 2 malformed
//! input, 3 violated precondition.

pub mod args;
pub mod check;
pub mod commands;
pub mod error;
pub mod input;

use std::path::Path;

use args::{Cli, Command};
use commands::Report;
use error::{CliError, CliResult};

pub fn execute(cli: &Cli) -> CliResult<Report> {
    match &cli.command {
        Command::Project(a) => commands::project(a),
        Command::Derive(a) => commands::derive(a),
        Command::Gateaux(a) => commands::gateaux(a),
        Command::Residual(a) => commands::residual(a),
        Command::Witness(a) => commands::witness(a),
        Command::Check(a) => check::check(a),
    }
}

fn out_path(cli: &Cli) -> Option<&Path> {
    let out = match &cli.command {
        Command::Project(a) => &a.out,
        Command::Derive(a) => &a.out,
        Command::Gateaux(a) => &a.out,
        Command::Residual(a) => &a.out,
        Command::Witness(a) => &a.out,
        Command::Check(a) => &a.out,
    };
    out.out.as_deref()
}

/// Runs the command and writes its output to `--out` or stdout. Returns the exit code.
pub fn run(cli: &Cli) -> u8 {
    let result = execute(cli).and_then(|report| {
        match out_path(cli) {
            Some(path) => std::fs::write(path, &report.text)
                .map_err(|e| CliError::parse(format!("cannot write {}: {e}", path.display())))?,
            None => print!("{}", report.text),
        }
        Ok(report.exit)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("lpproj: {e}");
            e.exit_code()
        }
    }
}
