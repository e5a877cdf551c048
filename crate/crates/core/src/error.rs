use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = QeError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum QeError {
    #[error("{file}:{line}: length mismatch: {detail}")]
    LengthMismatch {
        file: String,
        line: usize,
        detail: String,
    },

    #[error("{file}:{line}: parse error: {detail}")]
    Parse {
        file: String,
        line: usize,
        detail: String,
    },

    #[error("{file}:{line}: value {value} outside [0, 1]")]
    Range {
        file: String,
        line: usize,
        value: f64,
    },

    #[error("empty input")]
    EmptyInput,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("inconsistent edit script: {0}")]
    InconsistentScript(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("system `{system}` does not provide the {stream} stream")]
    MissingStream { system: String, stream: String },

    #[error("ensemble weights sum to zero")]
    ZeroWeights,

    #[error("singular normal equations (lambda = {lambda})")]
    SingularSystem { lambda: f64 },

    #[error("span {span} out of bounds: {detail}")]
    SpanOutOfBounds { span: String, detail: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl QeError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        QeError::Io {
            path: path.into(),
            source,
        }
    }

    /// Validation problems map to 1, filesystem problems to 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            QeError::Io { .. } => 2,
            _ => 1,
        }
    }
}
