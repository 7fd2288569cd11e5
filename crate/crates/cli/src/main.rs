mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::commands::CommandRegistry;
use crate::config::{Args, RunConfig};
use crate::error::{CliError, CliResult};

fn run(args: &Args, registry: &CommandRegistry) -> CliResult<()> {
    let command = registry.get(&args.command)?;
    let cfg = RunConfig::resolve(args, command.defaults())?;
    let out = command.run(&cfg)?;
    output::emit(&out, &cfg, args.out.as_deref())?;
    if out.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(out.failures))
    }
}

fn main() -> ExitCode {
    let registry = CommandRegistry::standard();
    let args = Args::parse();
    match run(&args, &registry) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("magsteklov: {e}");
            if matches!(e, CliError::Config(_)) && registry.get(&args.command).is_err() {
                eprint!("commands:\n{}", registry.summary());
            }
            ExitCode::from(e.exit_code())
        }
    }
}
