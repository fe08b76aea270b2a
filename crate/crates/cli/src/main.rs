//! `rdb` — experiment front end for the randomly-directional beamforming
//! simulation library: single runs, grid sweeps, bundled figure presets,
//! validation suites, and closed-form theory tables.

mod cli;
mod exec;
mod theory_cmd;

use clap::Parser;
use cli::{Cli, Command};
use std::process::ExitCode;

fn main() -> ExitCode {
    let args = Cli::parse();
    let outcome = match &args.command {
        Command::Run(a) => exec::cmd_run(a).map(|_| true),
        Command::Sweep(a) => exec::cmd_sweep(a).map(|_| true),
        Command::Figure(a) => exec::cmd_figure(a).map(|_| true),
        Command::Validate(a) => exec::cmd_validate(a),
        Command::Theory(a) => theory_cmd::cmd_theory(&a.query).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
