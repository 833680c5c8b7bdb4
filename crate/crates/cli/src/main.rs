mod args;
mod commands;
mod config;
mod error;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use config::{resolve, CommonConfig, FileConfig};
use error::CliError;

fn run(cli: &Cli) -> Result<commands::Outcome, CliError> {
    let file = match &cli.common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let common: CommonConfig = resolve(file.common(), &cli.common, "options")?;
    commands::dispatch(common, &file, &cli.command)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            for line in &outcome.lines {
                let _ = writeln!(out, "{line}");
            }
            for path in outcome.reporter.written() {
                let _ = writeln!(out, "wrote {}", path.display());
            }
            let _ = writeln!(out, "config sha256 {}", outcome.reporter.hash());
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("{}: verdict failed", cli.command.name());
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
