use thiserror::Error;

/// Errors raised by the maps, oracles, and report plumbing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alpha must lie strictly inside (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("singular input {value}: within {epsilon:e} of the pole")]
    Singular { value: f64, epsilon: f64 },

    #[error("degenerate input ({nu}, {gamma}): nu^2 + gamma^2 vanishes")]
    Degenerate { nu: f64, gamma: f64 },

    #[error("point ({nu}, {gamma}) lies on the boundary gamma = 0")]
    Boundary { nu: f64, gamma: f64 },

    #[error("orbit hit the pole guard; last valid index {last_valid}")]
    Truncated { last_valid: usize },

    #[error("need at least {required} points, got {actual}")]
    TooFewPoints { required: usize, actual: usize },

    #[error("{method} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("{dropped} of {total} samples hit the pole (limit {limit})")]
    TooManyDropped {
        dropped: usize,
        total: usize,
        limit: usize,
    },

    #[error("adaptive quadrature failed: estimated error {error:e} after {intervals} intervals")]
    Quadrature { error: f64, intervals: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
