use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("symbol {name} used with arity {first} and {second}")]
    ArityClash { name: String, first: usize, second: usize },
    #[error("64-bit symbol id collision between {first} and {second}")]
    SymbolCollision { first: String, second: String },
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("invalid problem: {0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableauError {
    #[error("action {0} is not applicable in this state")]
    Inapplicable(String),
    #[error("stale undo mark")]
    StaleMark,
    #[error("invalid action encoding {0}")]
    BadEncoding(u64),
}

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("no training examples")]
    NoExamples,
    #[error("training examples mix policy and value targets")]
    MixedKinds,
    #[error("feature index {0} out of range")]
    IndexOutOfRange(u32),
    #[error("{path}:{line}: {message}")]
    Malformed { path: String, line: usize, message: String },
    #[error("model constants do not match this build: {0}")]
    ConstantMismatch(String),
    #[error("external learner failed: {0}")]
    External(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Invalid(String),
}
