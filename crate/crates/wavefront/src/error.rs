use thiserror::Error;

/// Errors raised by the simulator and its diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({w1}, {w2}) outside domain box")]
    Domain { w1: f64, w2: f64 },
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("riemann solver failed: {0}")]
    Solver(String),
    #[error("interaction cap of {cap} exceeded at t = {time}")]
    InteractionCap { cap: usize, time: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Degenerate(_) | Error::Numerical(_) | Error::Solver(_) | Error::InteractionCap { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
