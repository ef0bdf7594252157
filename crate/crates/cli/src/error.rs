use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at line {line}, column {column}: {message}")]
    Config { line: usize, column: usize, message: String },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("malformed {what}: {message}")]
    Format { what: String, message: String },

    #[error("unsupported format version {found} (reader supports major {supported})")]
    UnsupportedVersion { found: String, supported: u32 },

    #[error("archive integrity check failed for {0}")]
    HashMismatch(String),

    #[error(transparent)]
    Core(#[from] warpflow::Error),
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io { path: path.as_ref().display().to_string(), source }
    }

    pub fn format(what: &str, message: impl std::fmt::Display) -> Self {
        Self::Format { what: what.into(), message: message.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
