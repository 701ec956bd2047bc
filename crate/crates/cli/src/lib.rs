//! Command-line front end: input parsing and validation, report generation,
//! series and volume computation, oracle cross-checks, text and JSON output.

pub mod commands;
pub mod input;
pub mod render;
