//! Config parsing, result files and subcommand dispatch for the `geomconc`
//! binary.

pub mod config;
pub mod output;
pub mod run;
