use std::path::PathBuf;

use thiserror::Error;

use crate::datamodel::Violation;

/// Failures raised while reading corpus files.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{file}:{line}: malformed line: {reason}")]
    MalformedLine {
        file: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{file}:{line}: missing field `{field}`")]
    MissingField {
        file: PathBuf,
        line: usize,
        field: String,
    },
    #[error("dangling {kind} reference: {id}")]
    DanglingReference { kind: String, id: String },
    #[error("corpus failed validation with {} violation(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<Violation>),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Model training and inference failures.
#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("degenerate training set: {0}")]
    DegenerateTraining(String),
    #[error("objective became non-finite at iteration {iteration}")]
    NonFinite { iteration: usize },
    #[error("dimension mismatch: model expects {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("cascade has no edges; use the non-crowdsourced fallback")]
    EmptyCascade,
    #[error("{0}")]
    InvalidConfig(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("prediction and truth lengths differ ({predictions} vs {truths})")]
    LengthMismatch { predictions: usize, truths: usize },
    #[error("no messages to split")]
    EmptyClass,
    #[error("split ratios must be nonnegative and sum to 1, got {0:?}")]
    BadRatios(Vec<f64>),
    #[error("reports were computed on different message sets")]
    SplitMismatch,
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synth config: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
