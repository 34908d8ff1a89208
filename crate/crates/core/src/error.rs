use thiserror::Error;

/// Errors produced by functionals, constructors, solvers and sweeps.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical parameter (grid size, tolerance, step) is unusable.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A formula would divide by zero (e.g. `A^3 = B^3`).
    #[error("singular expression: {0}")]
    Singular(String),

    /// A root bracket does not contain a sign change.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// The objective was invalid at every probed point.
    #[error("objective invalid everywhere on the search grid")]
    EmptyResult,

    /// Tabulated data cannot support the requested analysis.
    #[error("data error: {0}")]
    Data(String),

    /// Tripodal entropy never exceeds symmetric-bipodal entropy at this edge density.
    #[error("no tripodal phase at e = {e}")]
    NoTripodalPhase { e: f64 },

    /// An iterative method failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// JSON (de)serialization failures.
    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Serde(err.to_string())
    }
}
