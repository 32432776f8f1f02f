//! Command-line front end for `recres`: instance files, resultant reports and
//! seeded fuzz campaigns.

pub mod commands;
pub mod fuzz;
pub mod instance;
pub mod verify;

pub use commands::{run, Cli, ExitCode};
