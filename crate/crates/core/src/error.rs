use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("store encoding: {0}")]
    Store(#[from] bincode::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("invalid robot model: {0}")]
    InvalidModel(String),

    #[error("scene generator gave up: {0}")]
    Generator(String),

    #[error("augmentation failed after {attempts} attempts")]
    Augmentation { attempts: usize },

    #[error("degenerate training set: {0}")]
    DegenerateDataset(String),

    #[error("memory store has no entry for goal pair ({from} -> {to})")]
    MissingPair { from: usize, to: usize },

    #[error("memory store mismatch: {0}")]
    StoreMismatch(String),

    #[error("start state is not inside any goal region")]
    StartOutsideGoals,

    #[error("exact tour limited to {max} goals, got {got}")]
    TourTooLarge { max: usize, got: usize },

    #[error("trimming {fraction} of {n} values leaves nothing")]
    OverTrimmed { fraction: f64, n: usize },

    #[error("plan result is not solved")]
    Unsolved,

    #[error("{0}")]
    Config(String),
}
