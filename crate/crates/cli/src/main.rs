//! `mgregion`: MG region bounds, schedules and Monte Carlo checks.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 when a check fails,
//! 1 on any other error.

mod args;
mod commands;
mod output;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Invalid};

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let config = serde_json::to_value(&cli.command)?;
    match &cli.command {
        Command::Region(a) => commands::region(a, &config),
        Command::Simulate(a) => commands::simulate(a, &config),
        Command::Verify(a) => verify::verify(a, &config),
        Command::Sweep(a) => commands::sweep(a, &config),
        Command::Topology(a) => commands::topology_cmd(a, &config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) if e.is::<Invalid>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
