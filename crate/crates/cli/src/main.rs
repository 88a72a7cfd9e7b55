use std::process::ExitCode;

use catport_cli::args::Cli;
use catport_cli::CliError;
use clap::{CommandFactory, Parser};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match catport_cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            let name = cli.command.name();
            let mut cmd = Cli::command();
            let mut sub = cmd
                .find_subcommand_mut(name)
                .expect("subcommand exists")
                .clone()
                .bin_name(format!("catport {name}"));
            sub.error(clap::error::ErrorKind::ValueValidation, msg)
                .exit()
        }
        Err(CliError::Failed(e))
            if e.downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(CliError::Failed(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
