mod args;
mod commands;
mod error;
mod output;
mod sweep;

use args::{Cli, Command};
use clap::Parser;
use error::{CliError, CliResult};
use std::process::ExitCode;

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("GAIA_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("GAIA_THREADS=`{raw}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    match &cli.command {
        Command::Grid(io) => commands::grid(io),
        Command::Lzsm(a) => commands::lzsm(a),
        Command::Compare(a) => commands::compare(a),
        Command::Interference(a) => commands::interference(a),
        Command::Selfcheck(a) => commands::selfcheck(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.kind().to_string());
            let _ = e.print();
            eprintln!("{}", err.to_json());
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
