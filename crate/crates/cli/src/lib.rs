//! Configuration, verification suites and report emission behind the `loopforms` binary.

pub mod config;
pub mod report;
pub mod suites;
pub mod table;

pub use config::{RunConfig, Suite};
pub use report::{emit_report, CheckRecord, Format, VerificationReport};
pub use suites::run_suite;
pub use table::coefficient_table;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown suite `{0}` (expected lie, loops, forms, string, caloron, pathfib, centralext or all)")]
    UnknownSuite(String),
    #[error("unknown format `{0}` (expected json, csv or text)")]
    UnknownFormat(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Numeric(#[from] loopforms::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
