//! Experiment runner behind the `ultradense` binary: config parsing, the
//! `train`, `lexicon`, `eval` and `sweep` commands, and exit codes.

pub mod commands;
pub mod config;

use ultradense::Error;

/// A library error tagged with the pipeline stage that produced it.
#[derive(Debug, thiserror::Error)]
#[error("{stage}: {source}")]
pub struct StageError {
    pub stage: &'static str,
    #[source]
    pub source: Error,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_EVALUATION: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

/// Process exit code for a failure.
pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::Io { .. }
        | Error::Parse { .. }
        | Error::DuplicateWord(_)
        | Error::InvalidValue { .. }
        | Error::LabelDomain { .. }
        | Error::EmptyResource(_)
        | Error::InsufficientVocabulary { .. }
        | Error::EmptyIntersection(_)
        | Error::MissingClass(_)
        | Error::DimensionMismatch { .. } => EXIT_INPUT,
        Error::Config(_)
        | Error::UnknownProperty(_)
        | Error::NeedsLinearMap(_)
        | Error::OverlappingSubspaces(_)
        | Error::InvalidDimension(_) => EXIT_CONFIG,
        Error::UndefinedCorrelation(_) | Error::DegenerateInput(_) => EXIT_EVALUATION,
        Error::InvalidMatrix(_) | Error::DegenerateMatrix(_) | Error::TrainingAborted { .. } => EXIT_NUMERICAL,
    }
}
