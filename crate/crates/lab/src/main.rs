use std::process::ExitCode;

use clap::Parser;
use innerlab_tools::cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let result = run(Cli::parse(), &mut std::io::stdout().lock());
    if let Err(e) = &result {
        eprintln!("error: {e:#}");
    }
    ExitCode::from(exit_code(&result))
}
