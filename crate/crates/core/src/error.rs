//! Error types shared across the library.

/// A sample from a parameter sweep, kept for search-failure diagnostics.
///
/// `value` is `None` when the continuation functional was undefined at `t`
/// (e.g. the trajectory never produced the event the functional reads).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSample {
    pub t: f64,
    pub value: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A point lies outside the metric's domain (r <= 0 in the half-plane,
    /// or off the open quadrant).
    #[error("domain violation: {0}")]
    Domain(String),

    /// Invalid argument to an operation.
    #[error("invalid input: {0}")]
    Input(String),

    /// A curve failed a geometric precondition (self-intersection, bad orientation).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// A requested event occurrence does not exist on the trajectory.
    #[error("not found: {0}")]
    NotFound(String),

    /// A bracketing or bisection search did not converge. Carries the sweep
    /// that was used to look for a bracket.
    #[error("search failure: {context} ({} sweep samples)", sweep.len())]
    SearchFailure {
        context: String,
        sweep: Vec<SweepSample>,
    },

    /// The curve shortening flow could not take a step above the dt floor.
    #[error("flow stalled: {0}")]
    FlowStalled(String),

    /// Filesystem or serialization failure.
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn search_failure(context: impl Into<String>, sweep: Vec<SweepSample>) -> Self {
        Error::SearchFailure {
            context: context.into(),
            sweep,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
