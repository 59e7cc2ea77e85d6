//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("network error fetching {endpoint}: {message} (retriable)")]
    Network { endpoint: String, message: String },

    #[error("missing field: {field}")]
    SchemaDrift { field: String },

    #[error("parse error in {file} row {row} column {column}: {message}")]
    Parse {
        file: String,
        row: usize,
        column: String,
        message: String,
    },

    #[error("unknown position code: {0}")]
    UnknownPosition(String),

    #[error("unknown team: {0}")]
    UnknownTeam(String),

    #[error("missing team alias for {team} in season {season}")]
    MissingTeamAlias { team: String, season: String },

    #[error("duplicate join key: {0}")]
    DuplicateKey(String),

    #[error("invalid availability value: {0}")]
    InvalidAvailability(String),

    #[error("no understat team match for {team} around {date}")]
    MissingTeamMatch { team: String, date: String },

    #[error("no fixture for {team} vs {opponent} in {season} gameweek {gameweek}")]
    MissingFixture {
        season: String,
        gameweek: u8,
        team: String,
        opponent: String,
    },

    #[error("fold {fold} has no samples for position {position}")]
    EmptyFold { fold: String, position: String },

    #[error("feature width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("schema mismatch: model trained on {expected}, input is {got}")]
    SchemaMismatch { expected: String, got: String },

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("missing artifact {artifact}; produce it with `{produced_by}`")]
    MissingArtifact {
        artifact: String,
        produced_by: String,
    },

    #[error("artifact corrupt at {path}: {message}")]
    CorruptArtifact { path: String, message: String },

    #[error("{0}")]
    Other(String),
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether retrying the operation may succeed (transient transport faults).
    pub fn is_retriable(&self) -> bool {
        matches!(self, Error::Network { .. })
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Other(format!("json: {e}"))
    }
}
