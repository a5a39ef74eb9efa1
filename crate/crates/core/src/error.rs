use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate time axis: all candidates share one frame")]
    DegenerateTime,

    #[error("degenerate geometry: horizontal spread {spread:.3} px is below the {floor:.3} px floor")]
    DegenerateGeometry { spread: f64, floor: f64 },

    #[error("no consensus: no sampled model reached {min_inliers} inliers")]
    NoConsensus { min_inliers: usize },

    #[error("cannot place {requested} non-overlapping dives in {duration} frames")]
    Placement { requested: usize, duration: usize },

    /// `position` is 1-based.
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
