mod cli;
mod commands;
mod config;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::cli::{Cli, Command};
use crate::commands::Context;
use crate::config::CliConfig;
use crate::error::CliError;

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = CliConfig::from_env()?;
    let format = cli.format.or(config.output_format).unwrap_or_default();
    let ctx = Context { config, format };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Derive(args) => commands::derive(&ctx, args, &mut out),
        Command::Parse(args) => commands::parse(&ctx, args, &mut out),
        Command::Resolve(args) => commands::resolve(&ctx, args, &mut out),
        Command::Bench(args) => commands::bench(&ctx, args, &mut out),
    }?;
    out.flush().map_err(|e| CliError::Output(e.to_string()))
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
