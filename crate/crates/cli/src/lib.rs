//! Driver for fibstat runs: configuration, the commands, and the CSV/JSON
//! tables they write.

pub mod config;
pub mod error;
pub mod output;
pub mod report;
pub mod run;

pub use config::{Command, RunConfig};
pub use error::CliError;
pub use run::{run, RunOutcome};

/// Version tag carried by every table header and manifest.
pub const SCHEMA: &str = "fibstat v1";
