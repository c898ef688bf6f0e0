use thiserror::Error;

/// Errors shared by the whole workbench.
///
/// Exit-code mapping used by the CLI: `Input` -> 2, `Resource` -> 3,
/// everything else that reaches the top level -> 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("state error: {0}")]
    State(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error("representative not usable: {0}")]
    Representative(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
