//! Configuration and subcommands behind the `nmwitness` binary.

pub mod commands;
pub mod config;

pub use commands::{cmd_check, cmd_scan, cmd_search};
pub use config::RunConfig;
