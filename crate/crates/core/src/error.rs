use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    Dimension {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("time {t} lies outside the tabulated range [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("{what} is not symmetric (relative defect {defect:e})")]
    NotSymmetric { what: String, defect: f64 },

    /// The position block `B` of the fundamental matrix is singular: the kernel
    /// prefactor diverges and the Gaussian form does not apply.
    #[error("caustic at t = {t}: {detail}")]
    Caustic { t: f64, detail: String },

    #[error("fundamental matrix at t = {t} is singular")]
    SingularFundamental { t: f64 },

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("no first maximum above the floor for site {site}")]
    NoMaximum { site: usize },

    #[error("Fock cutoff {cutoff} too small: top-level population {leakage:e}")]
    Truncation { cutoff: usize, leakage: f64 },
}

impl Error {
    pub(crate) fn dimension(what: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::Dimension {
            what: what.into(),
            expected,
            found,
        }
    }

    pub(crate) fn caustic(t: f64, detail: impl Into<String>) -> Self {
        Error::Caustic {
            t,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
