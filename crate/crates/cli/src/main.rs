//! `ellface`: weight tables, twistor dumps and identity checks.
//!
//! Exit status: 0 when everything passes, 1 on a verification failure, 2 on a
//! usage or domain error (reported as a JSON record on standard error).

mod config;
mod error;
mod output;
mod run;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::{Flags, RunConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "ellface", version, about = "Elliptic face weights and dynamical R matrices")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Table of W̄, κ and W for every plaquette at the base height.
    Weights(Flags),
    /// Run verification suites and write one report row per grid point.
    Verify(Flags),
    /// Dump F(z, λ) by the product and closed constructions.
    Twistor(Flags),
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    match &cli.cmd {
        Cmd::Weights(f) => {
            let cfg = RunConfig::from_flags(f, false)?;
            output::emit(&cfg, &run::cmd_weights(&cfg)?)?;
            Ok(true)
        }
        Cmd::Twistor(f) => {
            let cfg = RunConfig::from_flags(f, false)?;
            output::emit(&cfg, &run::cmd_twistor(&cfg)?)?;
            Ok(true)
        }
        Cmd::Verify(f) => {
            let cfg = RunConfig::from_flags(f, true)?;
            let (text, ok) = run::cmd_verify(&cfg)?;
            output::emit(&cfg, &text)?;
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", json!({ "error": { "kind": e.kind(), "message": e.to_string() } }));
            ExitCode::from(2)
        }
    }
}
