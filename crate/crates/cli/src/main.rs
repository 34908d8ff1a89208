use std::process::ExitCode;

use clap::Parser;
use strauss_cli::{exit_code, init_threads, run, Cli, Status, EXIT_NUMERICAL};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| run(cli)) {
        Ok(Status::Complete) => ExitCode::SUCCESS,
        Ok(Status::Partial(diagnostic)) => {
            eprintln!("strauss: numerical failure, table is partial: {diagnostic}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(err) => {
            eprintln!("strauss: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
