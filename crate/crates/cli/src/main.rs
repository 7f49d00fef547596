use std::process::ExitCode;

use clap::Parser;
use lp_projection_cli::args::Cli;

fn main() -> ExitCode {
    ExitCode::from(lp_projection_cli::run(&Cli::parse()))
}
