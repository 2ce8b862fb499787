use std::process::ExitCode;

use clap::Parser;
use permlab::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("permlab: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
