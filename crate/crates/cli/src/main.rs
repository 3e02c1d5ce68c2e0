use std::process::ExitCode;

use clap::Parser;
use stadion_cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match stadion_cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_status())
        }
    }
}
