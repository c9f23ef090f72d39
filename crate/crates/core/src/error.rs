use num_complex::Complex64;
use thiserror::Error;

/// Every failure the library reports. The CLI maps the variants onto its
/// exit-code contract, so keep the split between configuration,
/// precondition and numeric failures meaningful.
#[derive(Debug, Error)]
pub enum GaborError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("capability error: {0}")]
    Capability(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    #[error(
        "quadrature did not stabilise at x={x}, xi={xi}: last estimates {previous} and {last}"
    )]
    Quadrature {
        x: f64,
        xi: f64,
        previous: Complex64,
        last: Complex64,
    },

    #[error("{context}: {source}")]
    AtNode {
        context: String,
        #[source]
        source: Box<GaborError>,
    },

    #[error("iteration did not converge after {iterations} steps (last residual {last_residual:e})")]
    NonConvergence {
        iterations: usize,
        last_residual: f64,
        residual_history: Vec<f64>,
    },

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GaborError {
    pub(crate) fn at(self, context: impl Into<String>) -> Self {
        GaborError::AtNode {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Strips node annotations and returns the underlying failure.
    pub fn root(&self) -> &GaborError {
        match self {
            GaborError::AtNode { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, GaborError>;
