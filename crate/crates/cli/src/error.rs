use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("column {0:?} is missing from the input header")]
    MissingColumn(String),

    #[error("treatment column must be coded 0/1, found {0}")]
    NonBinaryTreatment(f64),

    #[error("outcome column must be coded 0/1 for a binary family, found {0}")]
    NonBinaryOutcome(f64),

    #[error("no usable rows remain after filtering")]
    EmptyAfterFiltering,

    #[error("box-cox requires positive values, found {value} at data row {row}")]
    NonPositiveValue { row: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] medimux_core::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("could not parse model or config file: {0}")]
    Toml(#[from] toml::de::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::MissingColumn(_) => "missing_column",
            CliError::NonBinaryTreatment(_) => "non_binary_treatment",
            CliError::NonBinaryOutcome(_) => "non_binary_outcome",
            CliError::EmptyAfterFiltering => "empty_after_filtering",
            CliError::NonPositiveValue { .. } => "non_positive_value",
            CliError::Config(_) => "config",
            CliError::Core(e) => e.kind(),
            CliError::Csv(_) => "csv",
            CliError::Toml(_) => "toml",
            CliError::Io(_) => "io",
            CliError::Json(_) => "json",
        }
    }
}

/// Machine-readable error body printed to standard error on failure.
#[derive(Serialize)]
pub struct ErrorReport<'a> {
    pub schema_version: &'static str,
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<&'a str>,
}

impl ErrorReport<'_> {
    pub fn new(err: &CliError, command: Option<&'static str>) -> ErrorReport<'static> {
        ErrorReport {
            schema_version: "medimux/error/v1",
            kind: err.kind(),
            message: err.to_string(),
            command,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
