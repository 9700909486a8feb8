mod commands;
mod config;
mod output;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command};
use output::Table;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_TOLERANCE: u8 = 2;
pub const EXIT_CAP: u8 = 3;

/// An error that ends the run with `code`.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    /// Invalid input, I/O trouble or a failed cross-check.
    pub fn error(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_TOLERANCE,
            msg: msg.into(),
        }
    }
}

impl From<farey_chain::Error> for Failure {
    fn from(e: farey_chain::Error) -> Self {
        let code = match e {
            farey_chain::Error::ResourceCap { .. } => EXIT_CAP,
            _ => EXIT_TOLERANCE,
        };
        Self {
            code,
            msg: e.to_string(),
        }
    }
}

/// A finished table, the exit code it implies and messages for stderr.
pub struct Outcome {
    pub table: Table,
    pub code: u8,
    pub notes: Vec<String>,
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let cfg = cli.resolve()?;
    let outcome = match cfg.command {
        Command::Partition => commands::partition(&cfg)?,
        Command::Spectrum => commands::spectrum(&cfg)?,
        Command::Expect => commands::expect(&cfg)?,
        Command::Table => commands::table(&cfg)?,
        Command::Verify => verify::run(&cfg)?,
    };
    output::emit(&outcome.table, &cfg)?;
    for note in &outcome.notes {
        eprintln!("farey-chain: {note}");
    }
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("farey-chain: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
