use thiserror::Error;

use crate::evolution::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside its documented range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Input samples or coefficients are unusable (non-finite, wrong length, asymmetric).
    #[error("data error: {0}")]
    Data(String),

    /// The integrator produced a non-finite or runaway state.
    #[error("blow-up at t = {time}: {reason}")]
    BlowUp {
        time: f64,
        reason: String,
        /// Snapshots recorded before the failure, when available.
        partial: Option<Box<Trajectory>>,
    },

    /// A diagnostic was requested on data that cannot support it.
    #[error("diagnostic error: {0}")]
    Diagnostic(String),

    /// One member of an ε-sweep failed.
    #[error("sweep member ε = {epsilon} failed: {source}")]
    SweepMember {
        epsilon: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn diag(msg: impl Into<String>) -> Self {
        Error::Diagnostic(msg.into())
    }
}
