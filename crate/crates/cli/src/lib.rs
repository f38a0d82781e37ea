//! Command-line front end: spec files, output formats and the subcommands of
//! the `cascade` binary.

pub mod args;
pub mod commands;
pub mod emit;
pub mod failure;
pub mod specfile;

pub use args::Cli;
pub use commands::run;
pub use failure::Failure;
