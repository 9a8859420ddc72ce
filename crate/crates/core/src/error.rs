use thiserror::Error;

/// Errors produced by fitting, sampling, simulation and summarization.
#[derive(Debug, Error)]
pub enum Error {
    /// The design matrix does not have full column rank. Carries the index
    /// of the first offending column (in the original column order).
    #[error("design matrix is rank deficient at column {0}")]
    RankDeficient(usize),

    /// Fewer rows than coefficients (or fewer than required by the model).
    #[error("insufficient rows: {n} rows for {q} coefficients")]
    InsufficientRows { n: usize, q: usize },

    /// The residual cross-covariance of the mediator system failed the
    /// positive semi-definiteness tolerance.
    #[error("mediator residual covariance is not positive semi-definite")]
    SingularResidualCovariance,

    /// Nearly all fitted probabilities are degenerate; the binary outcome
    /// is (quasi-)separated by the linear predictor.
    #[error("separation detected: {degenerate} of {n} fitted probabilities are degenerate")]
    SeparationDetected { degenerate: usize, n: usize },

    /// A covariance matrix could not be factorized even after adding
    /// diagonal jitter up to 1e-8.
    #[error("covariance factorization failed after diagonal jitter up to 1e-8")]
    CholeskyFailure,

    /// Adaptive quadrature hit its subdivision cap before reaching the
    /// requested absolute tolerance.
    #[error("quadrature did not reach tolerance {tol:e}: error {err:e} after {intervals} intervals")]
    QuadratureNotConverged { tol: f64, err: f64, intervals: usize },

    /// A latent scale that must be strictly positive was not.
    #[error("latent scale is not positive: {0}")]
    NonPositiveScale(f64),

    /// Requested more rows than the counterfactual table holds.
    #[error("requested sample of {requested} rows exceeds table size {available}")]
    SampleTooLarge { requested: usize, available: usize },

    /// Input data or configuration violated a documented invariant.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Stable machine-readable tag for each error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::RankDeficient(_) => "rank_deficient",
            Error::InsufficientRows { .. } => "insufficient_rows",
            Error::SingularResidualCovariance => "singular_residual_covariance",
            Error::SeparationDetected { .. } => "separation_detected",
            Error::CholeskyFailure => "cholesky_failure",
            Error::QuadratureNotConverged { .. } => "quadrature_not_converged",
            Error::NonPositiveScale(_) => "non_positive_scale",
            Error::SampleTooLarge { .. } => "sample_too_large",
            Error::InvalidInput(_) => "invalid_input",
            Error::Io(_) => "io",
        }
    }
}
