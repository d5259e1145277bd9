//! `vblast` — analytic curves, Monte Carlo sweeps and validation reports for
//! the n-by-2 V-BLAST detector with ZF-MRC combining.
//!
//! Exit codes: 0 success, 1 usage error, 2 failed validation check, 3 I/O
//! error.

mod args;
mod commands;
mod output;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

#[derive(Debug)]
pub enum AppError {
    Usage(String),
    CheckFailure(String),
    Io(String),
}

impl AppError {
    fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::CheckFailure(_) => 2,
            AppError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Usage(m) | AppError::CheckFailure(m) | AppError::Io(m) => m,
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(err: std::io::Error) -> Self {
        AppError::Io(err.to_string())
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Curves(args) => commands::curves(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Validate(args) => commands::validate(args),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.exit_code()
        }
    }
}
