//! Command-line front end of `dlab-core`: artifact formats, SVG plots and the `dlab` commands.

pub mod commands;
pub mod formats;
pub mod plot;

pub use commands::{exit_code, render, run, Cli, Command, Status};
