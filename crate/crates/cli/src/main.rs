use std::process::ExitCode;

use clap::Parser;
use tubekit_cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match tubekit_cli::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
