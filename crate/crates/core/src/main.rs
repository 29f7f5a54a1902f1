use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use qps::cli::{run, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let outcome = run(&config);
    if !outcome.stderr.is_empty() {
        eprintln!("error: {}", outcome.stderr);
    }
    if !outcome.stdout.is_empty() {
        let written = match &config.output {
            Some(path) if !config.selftest => std::fs::write(path, &outcome.stdout),
            _ => std::io::stdout().write_all(outcome.stdout.as_bytes()),
        };
        if let Err(e) = written {
            eprintln!("error: cannot write report: {e}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(outcome.code as u8)
}
