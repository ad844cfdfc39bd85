use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The boosted spin axis collapsed (`|v| < 1e-14`), only reachable as
    /// `beta -> 1` with the measurement direction perpendicular to the motion.
    #[error("degenerate observable: boosted axis norm {norm:e} for direction {direction}")]
    DegenerateObservable { norm: f64, direction: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("undersampled Bell test: setting pair {pair} has {count} rounds, need at least {required}")]
    Undersampled {
        pair: String,
        count: usize,
        required: usize,
    },

    #[error("unknown figure id {0} (expected 1..=6)")]
    UnknownFigure(u32),

    #[error("Monte Carlo run gave up after {rejected} degenerate samples")]
    TooManyRejections { rejected: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
