use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the domain of the operation (point outside the disk,
    /// pole proximity, malformed curve, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A precondition of the operation does not hold for these inputs.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Iterative solver failed to converge; carries the worst residual seen.
    #[error("solver did not converge (worst residual {residual:e})")]
    NonConvergence { residual: f64 },

    /// A node or size cap was exceeded; reports how far the computation got.
    #[error("capacity exceeded: {what} (reached {reached})")]
    Capacity { what: String, reached: usize },

    /// Hyperbolic distance requested between points numerically on the
    /// boundary; reported instead of saturating to infinity.
    #[error("hyperbolic distance overflow (t = {t})")]
    Overflow { t: f64 },

    /// Search failed to locate the requested object; carries the margin
    /// that was actually achieved.
    #[error("not found: {what} (achieved margin {margin})")]
    NotFound { what: String, margin: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
