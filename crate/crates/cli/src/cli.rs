use std::path::PathBuf;

use clap::Parser;

use crate::dsl::parse_connection_file;
use crate::run::{run, Command, Options, Report};

/// Decide cyclic-parallel Ricci and Szabó properties of affine connections.
#[derive(Debug, Parser)]
#[command(name = "szabo-lab", version)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Connection file (not needed for verify-paper).
    pub file: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Seed for randomized verification.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of random samples for randomized verification.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long)]
    pub timing: bool,
}

/// Rendered report and process exit code.
pub struct Outcome {
    pub output: String,
    pub code: u8,
}

pub fn execute(args: &Args) -> Outcome {
    let opts = Options {
        seed: args.seed,
        samples: args.samples,
        timing: args.timing,
    };
    let report = if args.command.needs_input() {
        match &args.file {
            None => Report::failed(args.command, "missing connection file".into()),
            Some(path) => match std::fs::read_to_string(path) {
                Err(e) => Report::failed(args.command, format!("cannot read {}: {e}", path.display())),
                Ok(text) => match parse_connection_file(&text) {
                    Err(e) => Report::failed(args.command, format!("{}: {e}", path.display())),
                    Ok(spec) => run(args.command, Some(&spec), &opts),
                },
            },
        }
    } else {
        run(args.command, None, &opts)
    };
    let output = if args.json {
        report.to_json_string()
    } else {
        report.to_text()
    };
    Outcome {
        output,
        code: report.exit_code(),
    }
}
