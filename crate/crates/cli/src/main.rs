//! `coxstab` command-line tool.
//!
//! Exit codes: 0 success, 2 unreadable or malformed input, 3 numerical
//! failure, 4 violated precondition.

mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;
use coxstab::ErrorClass;

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Parse => 2,
        ErrorClass::Numerical => 3,
        ErrorClass::Contract => 4,
    }
}

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(exit_code(ErrorClass::Contract));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(exit_code(ErrorClass::Contract));
        }
    }
    match commands::dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}
