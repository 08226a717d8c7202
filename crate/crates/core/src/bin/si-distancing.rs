use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use si_distancing::cli::{run, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (out, code) = match run(&cli) {
        Ok(result) => result,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &out),
        None => std::io::stdout().write_all(out.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    ExitCode::from(code as u8)
}
