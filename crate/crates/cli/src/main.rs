//! `proxgrowth` command-line tool.
//!
//! Exit codes: 0 when the analysis is positive, 2 when it is negative, 1 on
//! usage, parse, IO or numerical errors.

mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;

use args::{Cli, Command};
use commands::Outcome;
use report::Report;

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let name = cli.command.name();
    let (outcome, options, json_path): (Outcome, serde_json::Value, Option<&String>) =
        match &cli.command {
            Command::ValidateModel(a) => (
                commands::validate_model(a)?,
                to_json(a)?,
                a.analysis.json.as_ref(),
            ),
            Command::Check(a) => (commands::check(a)?, to_json(a)?, a.analysis.json.as_ref()),
            Command::Valiron(a) => (commands::valiron(a)?, to_json(a)?, a.analysis.json.as_ref()),
            Command::Construct(a) => (
                commands::construct(a)?,
                to_json(a)?,
                a.analysis.json.as_ref(),
            ),
            Command::Means(a) => (commands::means(a)?, to_json(a)?, a.json.as_ref()),
            Command::Limits(a) => (commands::limits_cmd(a)?, to_json(a)?, a.json.as_ref()),
        };
    let report = Report::new(name, &options, outcome.payload)?;
    let text = serde_json::to_string_pretty(&report)? + "\n";
    if let Some(path) = json_path {
        std::fs::write(path, &text).map_err(|e| anyhow::anyhow!("writing {path}: {e}"))?;
    }
    print!("{text}");
    Ok(outcome.positive)
}

fn to_json<T: Serialize>(v: &T) -> anyhow::Result<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
