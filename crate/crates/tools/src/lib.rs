//! File formats, run reports and the `helly` command-line tool built on
//! `helly-core`.

mod cli;
pub mod io;
pub mod report;

pub use cli::{run, EXIT_INPUT, EXIT_OK, EXIT_VIOLATED};
