use thiserror::Error;

pub type Result<T, E = QdError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum QdError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite measure value at dimension {0}")]
    NonFiniteMeasure(usize),

    #[error("invalid bounds in dimension {dim}: low {low} must be below high {high}")]
    InvalidBounds { dim: usize, low: f64, high: f64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("population of {0} individuals is too small to form a triplet")]
    PopulationTooSmall(usize),

    #[error("no ground-truth measures for individual {0}")]
    MissingMeasures(u64),

    #[error("no features for individual {0}")]
    MissingFeatures(u64),

    #[error("empty judgment list")]
    EmptyJudgments,

    #[error("empty dataset")]
    EmptyData,

    #[error("need at least {k} samples for {k} components, got {n}")]
    NotEnoughSamples { n: usize, k: usize },

    #[error("feedback budget exhausted: requested {requested}, {remaining} remaining of {total}")]
    BudgetExhausted {
        requested: usize,
        remaining: usize,
        total: usize,
    },

    #[error("judge timed out waiting for a judgment")]
    JudgeTimeout,

    #[error("judge disconnected")]
    JudgeDisconnected,

    #[error("unknown judgment request {0}")]
    UnknownRequest(u64),

    #[error("judgment request {0} was already resolved")]
    AlreadyResolved(u64),

    #[error("mismatched trial configurations: {0}")]
    MismatchedTrials(String),

    #[error("heatmap export needs a 2-dimensional archive, got {0} dimensions")]
    NotTwoDimensional(usize),

    #[error("maze layout line {line}: {msg}")]
    Layout { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
