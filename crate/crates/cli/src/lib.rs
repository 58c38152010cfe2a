//! Connection files, command dispatch and reports for the `szabo-lab` tool.

pub mod cli;
pub mod dsl;
pub mod run;

pub use dsl::{parse_connection_file, ConnectionSpec, DslError};
pub use run::{run, Command, Options, Report};
