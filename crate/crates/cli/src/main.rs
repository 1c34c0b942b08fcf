//! `qprecomp`: seeded runs of the teleportation protocols, DME sweeps and
//! cost tables.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error. Every output
//! is a deterministic function of the subcommand, its flags and `--seed`.

mod args;
mod commands;
mod envelope;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::envelope::Envelope;

/// Why a run stopped early.
#[derive(Debug)]
pub enum Exit {
    /// Bad flags or parameters; nothing was simulated.
    Usage(String),
    /// A run finished but failed its own check, or the simulator errored.
    Failed(String),
}

impl From<qprecomp::Error> for Exit {
    fn from(e: qprecomp::Error) -> Self {
        Exit::Failed(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), Exit> {
    let envelope = Envelope::load()?;
    match cli.command {
        Command::Teleport(a) => commands::teleport(&a, &envelope),
        Command::ZkRun(a) => commands::zk_run(&a, &envelope),
        Command::DmeSweep(a) => commands::dme_sweep(&a, &envelope),
        Command::CostTable(a) => commands::cost_table(&a, &envelope),
        Command::Selftest(a) => commands::selftest(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits 2 on usage errors and 0 for --help.
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Exit::Failed(msg)) => {
            eprintln!("failed: {msg}");
            ExitCode::from(1)
        }
    }
}
