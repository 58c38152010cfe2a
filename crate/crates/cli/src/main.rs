use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use szabo_lab::cli::{execute, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = execute(&args);
    let written = match &args.out {
        Some(path) => std::fs::write(path, &outcome.output),
        None => std::io::stdout().write_all(outcome.output.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("szabo-lab: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.code)
}
