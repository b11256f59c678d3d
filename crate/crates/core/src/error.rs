use thiserror::Error;

/// Errors produced anywhere in the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (bad order, missing evaluator, unknown key, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Mesh file could not be parsed; carries the offending line number.
    #[error("mesh parse error at line {line}: {msg}")]
    MeshParse { line: usize, msg: String },

    /// Topological or geometric defect in a parsed mesh.
    #[error("mesh error: {0}")]
    Mesh(String),

    /// Operator construction failed (degenerate nodes, singular matrix).
    #[error("construction error: {0}")]
    Construction(String),

    /// The solution state became unusable (non-finite fields, blowup).
    #[error("state error: {0}")]
    State(String),

    /// Misuse of an API (mismatched sizes, incompatible sample grids).
    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn mesh(msg: impl Into<String>) -> Self {
        Error::Mesh(msg.into())
    }
}
