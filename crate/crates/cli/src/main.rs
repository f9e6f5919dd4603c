use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use strichartz_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.shared.out {
        Some(path) => fs::write(path, &outcome.output).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => std::io::stdout()
            .write_all(outcome.output.as_bytes())
            .map_err(|e| CliError::Output(e.to_string())),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if let Some(msg) = outcome.message {
        eprintln!("{msg}");
    }
    ExitCode::from(outcome.status)
}
