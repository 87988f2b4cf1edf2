//! File IO, DOT and JSON export, and the `ctslab` command line on top of
//! `ctslab-core`.

pub mod cli;
pub mod dot;
pub mod io;
pub mod report;

pub use cli::run_cli;
