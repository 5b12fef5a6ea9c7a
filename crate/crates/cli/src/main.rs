use std::process::ExitCode;

use clap::Parser;
use dlab::commands::{EXIT_CHECK_FAILED, EXIT_OK};
use dlab::{exit_code, run, Cli, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Passed) => ExitCode::from(EXIT_OK),
        Ok(Status::CheckFailed) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
