use std::process::ExitCode;

use clap::Parser;

use growup_cli::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("growup: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
