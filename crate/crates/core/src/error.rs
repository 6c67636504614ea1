use thiserror::Error;

/// Errors raised by the library's fallible operations.
///
/// Validation problems are not errors: they are reported as data by the
/// `validate*` functions. An `Error` means an operation could not run.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("invalid precubical set: {0}")]
    InvalidPrecubical(String),

    #[error("invalid globular complex: {0}")]
    InvalidComplex(String),

    #[error("unknown catalog entry `{name}` (valid: {valid})")]
    UnknownCatalog { name: String, valid: String },

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown cell `{0}`")]
    UnknownCell(String),

    #[error("cell `{cell}` has dimension {found}, expected {expected}")]
    WrongDimension {
        cell: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("boundary maps do not compose to zero: ∂_{degree}∘∂_{next} has entry {value} at ({row}, {col})", next = degree + 1)]
    NotAComplex {
        degree: usize,
        row: usize,
        col: usize,
        value: String,
    },

    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error("subdivision step {step} ({op}) is not applicable: {reason}")]
    Inapplicable {
        step: usize,
        op: String,
        reason: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
