use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("matrix {name} is not symmetric at ({row}, {col}): {upper} != {lower}")]
    NonSymmetric {
        name: String,
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },

    #[error("unknown builtin game `{0}`")]
    UnknownBuiltin(String),

    #[error("player index {index} out of range for a {players}-player game")]
    PlayerOutOfRange { index: usize, players: usize },

    #[error("point has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point contains a non-finite entry at index {0}")]
    NonFinitePoint(usize),

    #[error("point lies outside the declared domain at coordinate {0}")]
    OutsideDomain(usize),

    #[error("cost of player {player} is not finite at {point:?}")]
    NonFiniteCost { player: usize, point: Vec<f64> },

    #[error("derivative method `{method}` is unavailable for the cost of player {player}")]
    MethodUnavailable { method: &'static str, player: usize },

    #[error("non-finite derivative for player {player} at {point:?}")]
    NonFiniteDerivative { player: usize, point: Vec<f64> },

    #[error("eigensolver did not converge")]
    EigenNonConvergence,

    #[error("oracle refused: {0}")]
    OracleRefused(String),

    #[error("invalid option: {0}")]
    InvalidOption(String),

    #[error("singular jacobian at iteration {iteration}: sigma_min/sigma_max = {ratio:e}")]
    SingularJacobian { iteration: usize, ratio: f64 },

    #[error("newton reached {iterations} iterations with residual {residual:e}")]
    MaxIters { iterations: usize, residual: f64 },

    #[error("non-finite value encountered{}", .time.map(|t| format!(" after t = {t}")).unwrap_or_default())]
    NonFinite { time: Option<f64> },

    #[error("continuation refused: {0}")]
    ContinuationRefused(String),

    #[error("discretized problem has {size} unknowns, above the cap of {cap}")]
    DimensionGuard { size: usize, cap: usize },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Whether the error stems from malformed input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidGame(_)
                | Error::Config(_)
                | Error::NonSymmetric { .. }
                | Error::UnknownBuiltin(_)
                | Error::PlayerOutOfRange { .. }
                | Error::DimensionMismatch { .. }
                | Error::NonFinitePoint(_)
                | Error::OutsideDomain(_)
                | Error::InvalidOption(_)
                | Error::Io(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
