use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-domain input data or parameters.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A combination of options that cannot be honoured, e.g. plan
    /// aggregation with an inner metric that produces no plan.
    #[error("configuration error: {0}")]
    Config(String),

    /// Rejection sampling exhausted its proposal budget without accepting.
    #[error(
        "no proposal accepted after {proposals} proposals (smallest distance {best_distance})"
    )]
    NoAcceptance {
        proposals: usize,
        best_distance: f64,
    },

    /// An internal invariant did not hold.
    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
