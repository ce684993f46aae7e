use thiserror::Error;

/// Errors raised by the lattice solver and the audit engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid grid, datum or constant configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// Operands that cannot be combined (grid or time mismatch, misaligned domains).
    #[error("usage error: {0}")]
    Usage(String),
    /// Non-finite value produced by a time step.
    #[error("blow-up at site {site} (x = {x}) while advancing to t = {t}")]
    BlowUp { site: usize, x: f64, t: f64 },
    /// Argument outside the existence window of a closed-form solution.
    #[error("domain error: {0}")]
    Domain(String),
    /// Hypothesis of an audited estimate is not met by the data.
    #[error("precondition error: {0}")]
    Precondition(String),
    /// Mollifier radius too small for the lattice.
    #[error("resolution error: {0}")]
    Resolution(String),
    /// No admissible cone decomposition inside the grid window.
    #[error("planning error: {0}")]
    Planning(String),
    /// Failure inside one level of a multi-run study.
    #[error("level {level}: {source}")]
    Level { level: usize, source: Box<Error> },
}

impl Error {
    /// `true` for errors that reflect bad input rather than a failed computation.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Config(_)
            | Error::Usage(_)
            | Error::Domain(_)
            | Error::Precondition(_)
            | Error::Resolution(_)
            | Error::Planning(_) => true,
            Error::BlowUp { .. } => false,
            Error::Level { source, .. } => source.is_input_error(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
