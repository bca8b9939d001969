use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    match chaoscrack_cli::run(chaoscrack_cli::Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
