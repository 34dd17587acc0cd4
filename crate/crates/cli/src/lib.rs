//! Command-line front end: reads JSON configurations or presets, runs the
//! numerical checks and writes `report.json` plus CSV data columns.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use args::{Cli, Command, Common};
pub use error::CliError;

/// Runs a parsed command line and writes its outputs. Nothing is written
/// unless every output was produced.
pub fn run(cli: &Cli) -> Result<Vec<String>, CliError> {
    let files = commands::execute(&cli.command, &cli.common)?;
    output::write_all(&cli.common.out, &files)?;
    Ok(files.into_iter().map(|f| f.name).collect())
}
