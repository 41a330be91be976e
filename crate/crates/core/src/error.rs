use thiserror::Error;

/// Errors raised across the simulation and analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("self-consistency did not converge after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64, history: Vec<f64> },

    #[error("numerical consistency violated: {0}")]
    NumericalConsistency(String),

    #[error("block structure violated: leakage {0:.3e}")]
    Structure(f64),

    #[error("singular quotient: denominator {0:.3e}")]
    SingularQuotient(f64),

    #[error("gapless spectrum: no positive eigenvalue above {0:.3e}")]
    Gapless(f64),

    #[error("untestable input: {0}")]
    Untestable(String),

    #[error("no transition detected (minimum fidelity {0:.6})")]
    NoTransition(f64),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
