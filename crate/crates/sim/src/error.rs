use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("config error: {0}")]
    Config(String),

    #[error("trace schema error in {path}: {message}")]
    Schema { path: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] csa_core::Error),
}

impl SimError {
    /// Process exit status: 2 for configuration or schema problems, 3 for
    /// I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) | SimError::Schema { .. } | SimError::Core(_) => 2,
            SimError::Io { .. } => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        SimError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
