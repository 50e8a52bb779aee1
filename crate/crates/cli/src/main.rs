use std::process::ExitCode;

use clap::Parser;
use grassmann_cli::commands::{self, Cli};

fn main() -> ExitCode {
    let json = std::env::args().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => return ExitCode::from(commands::report_usage(&e, json) as u8),
    };
    let stdout = std::io::stdout();
    match commands::run(&cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => ExitCode::from(commands::report_error(&e, cli.json_errors) as u8),
    }
}
