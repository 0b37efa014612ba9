use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("tainted fraction {fraction:.6} exceeds the ceiling {ceiling}")]
    Taint { fraction: f64, ceiling: f64 },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot read {}: {msg}", path.display())]
    Read { path: PathBuf, msg: String },
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    schema: &'a str,
    error: &'a str,
    exit_code: i32,
    message: String,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Taint { .. } => 3,
            CliError::Invariant(_) | CliError::Io { .. } | CliError::Read { .. } => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Taint { .. } => "taint_ceiling",
            CliError::Invariant(_) => "invariant",
            CliError::Io { .. } => "io",
            CliError::Read { .. } => "read",
        }
    }

    /// One-line JSON error record for stderr.
    pub fn record(&self) -> String {
        serde_json::to_string(&ErrorRecord {
            schema: crate::SCHEMA,
            error: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
        })
        .expect("error record serializes")
    }
}

impl From<fibstat_core::Error> for CliError {
    fn from(e: fibstat_core::Error) -> Self {
        use fibstat_core::Error as E;
        match e {
            E::InvalidArgument(_)
            | E::Parse { .. }
            | E::MalformedAction(_)
            | E::Unsupported { .. }
            | E::MissingSigma(_) => CliError::Config(e.to_string()),
            E::Overflow(_) | E::Predicate { .. } | E::Undecided { .. } => {
                CliError::Invariant(e.to_string())
            }
        }
    }
}
