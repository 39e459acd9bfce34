#![forbid(unsafe_code)]
//! Config-driven runs over relhyp-core: build one construction, run its analyzers, write
//! JSON reports and graph exports.

pub mod config;
pub mod dot;
mod run;

pub use config::{load_config, parse_config, AnalyzerSpec, Construction, ExportSpec, HoroballBase, ModelSource, PeripheralSpec, RunConfig};
pub use dot::{export_dot, from_dot, to_dot};
pub use run::{run, AnalyzerOutcome, RunOutcome};

/// Exit code for a bad config, model or preset.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code when an analyzer fails or a construction cannot be built.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("model: {0}")]
    Model(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("graph: {0}")]
    Graph(String),
    #[error("{failed} of {total} analyzers failed")]
    AnalyzerFailure { failed: usize, total: usize },
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::UnknownPreset(_) | CliError::Invalid(_) | CliError::Model(_) => EXIT_CONFIG,
            _ => EXIT_FAILURE,
        }
    }
}

impl From<relhyp_core::model::ModelError> for CliError {
    fn from(e: relhyp_core::model::ModelError) -> Self {
        use relhyp_core::model::ModelError;
        match e {
            ModelError::UnknownPreset(p) => CliError::UnknownPreset(p),
            ModelError::Parse { line, column, message } => CliError::Parse { line, column, message },
            other => CliError::Model(other.to_string()),
        }
    }
}
