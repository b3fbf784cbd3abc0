use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate scaling at iteration {iteration}: second-moment scaler is zero in coordinate {coordinate}")]
    DegenerateScaling { iteration: u64, coordinate: usize },

    #[error("non-finite iterate at iteration {iteration}")]
    Divergence { iteration: u64 },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("game does not provide {0}")]
    MissingOracle(&'static str),

    #[error("trace has {trace} records but {states} states were supplied")]
    TraceMismatch { trace: usize, states: usize },

    #[error("reference point has zero norm")]
    ZeroReference,
}
