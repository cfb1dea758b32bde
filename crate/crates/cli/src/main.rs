use std::process::ExitCode;

use clap::Parser;
use netgnar_cli::{run, Cli, Outcome, INPUT_ERROR_EXIT};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if let Outcome::CellFailures(n) = outcome {
                eprintln!("warning: {n} cell(s) failed; see summary output");
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INPUT_ERROR_EXIT)
        }
    }
}
