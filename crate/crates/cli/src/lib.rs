//! Command-line front end: coupling-function parser, run configuration and
//! report assembly. The binary in `main.rs` only handles flags and I/O.

pub mod config;
pub mod error;
pub mod expr;
pub mod run;

pub use config::{Command, Format, RunConfig};
pub use error::CliError;
pub use run::{run, Report};
