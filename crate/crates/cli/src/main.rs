//! `hamrep`: command-line front end for repeater construction, channel and
//! code validation, region scans and key-rate curves.
//!
//! Exit status: 0 on success, 1 when a requested numeric validation fails or
//! an output cannot be written, 2 on invalid input.

mod args;
mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use hamrep::Error;

use args::Cli;
use config::{RunConfig, UsageError};

fn execute(cli: Cli) -> Result<bool> {
    let (global, task) = match cli.command.into_task() {
        Ok(task) => (cli.global, task),
        Err(path) => {
            let (base, task) = RunConfig::load(&path)?.split();
            (cli.global.or(base), task)
        }
    };
    config::validate_global(&global)?;
    config::validate_task(&task)?;
    let output = commands::run(&task, &global)?;
    match &global.out {
        Some(path) => std::fs::write(path, &output.body)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => std::io::stdout().write_all(output.body.as_bytes())?,
    }
    Ok(output.pass)
}

fn exit_status(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(
            Error::UnknownCode(_)
            | Error::InvalidCode(_)
            | Error::InvalidBasis(_)
            | Error::ParameterOutOfRange { .. }
            | Error::EmptyGrid(_)
            | Error::NotOrthonormal { .. }
            | Error::OccupationOutOfRange { .. },
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("validation failed");
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_status(&err))
        }
    }
}
