use std::process::ExitCode;

use clap::Parser;
use heisenberg_cmc_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.code == 0 => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hcmc: {e}");
            ExitCode::from(e.code)
        }
    }
}
