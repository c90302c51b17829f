use thiserror::Error;

/// Failures raised by the solvers, the radial operator and the verifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QesError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Level 0 would need a terminating series with `a_0 != 0` and
    /// `a_1 = a_2 = ... = 0`, which the recurrence forbids.
    #[error(
        "no ground state exists at level 0: a terminating series needs a_0 != 0, \
         but the recurrence then forces a_2 != 0 (request level >= 1)"
    )]
    NoGroundState,

    #[error("missing Coulomb strength Z: {0}")]
    MissingCoulomb(&'static str),

    #[error("non-positive radius {0}")]
    NonPositiveRadius(f64),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("eigen-solver failure: {0}")]
    Solver(String),

    #[error("degenerate state: {0}")]
    DegenerateState(String),
}

pub type Result<T> = std::result::Result<T, QesError>;
