//! Command-line front end: figure data as CSV, single teleportation runs and
//! cavity feasibility reports.

pub mod args;
pub mod commands;
pub mod output;

use std::io::Write;

use args::{Cli, Command};
use commands::Report;

#[derive(Debug)]
pub enum CliError {
    /// Bad parameters; reported with the usage text.
    Usage(String),
    Failed(anyhow::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Failed(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<catport::Error> for CliError {
    fn from(e: catport::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failed(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(e.into())
    }
}

/// Computes a command's output without writing anything.
pub fn execute(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Fig1(a) => commands::fig1(a),
        Command::Fig2(a) => commands::fig2(a),
        Command::Fig3(a) => commands::fig3(a),
        Command::Pfail(a) => commands::pfail(a),
        Command::Teleport(a) => commands::teleport_cmd(a),
        Command::Feasibility(a) => commands::feasibility_cmd(a),
    }
}

/// Runs a command. With `--out` the CSV and its manifest go to disk;
/// otherwise the summary (or the CSV, if there is none) goes to stdout.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let report = execute(&cli.command)?;
    let (out, params) = match &cli.command {
        Command::Fig1(a) => (&a.out, serde_json::to_value(a)),
        Command::Fig2(a) => (&a.out, serde_json::to_value(a)),
        Command::Fig3(a) => (&a.out, serde_json::to_value(a)),
        Command::Pfail(a) => (&a.out, serde_json::to_value(a)),
        Command::Teleport(a) => (&a.out, serde_json::to_value(a)),
        Command::Feasibility(a) => (&a.out, serde_json::to_value(a)),
    };
    let params = params.map_err(anyhow::Error::from)?;
    let mut stdout = std::io::stdout().lock();
    if let Some(summary) = &report.summary {
        writeln!(stdout, "{summary}")?;
    }
    match out {
        Some(path) => {
            let m = output::write_outputs(
                path,
                cli.command.name(),
                &params,
                report.seed,
                &report.table,
            )?;
            eprintln!("wrote {} (sha256 {})", path.display(), m.output_sha256);
        }
        None if report.summary.is_none() => stdout.write_all(&report.table.to_csv()?)?,
        None => {}
    }
    Ok(())
}
