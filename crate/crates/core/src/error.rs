use thiserror::Error;

use crate::maxent::MaxentResult;

/// Errors raised by the operator, information and completion routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("operator is not strictly positive (min eigenvalue {min_eig:.3e})")]
    NotPositive { min_eig: f64 },

    #[error("trace {trace} is not one")]
    NotNormalized { trace: f64 },

    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("marginal family is inconsistent (max overlap residual {residual:.3e})")]
    Inconsistent { residual: f64 },

    #[error("marginals disagree (residual {residual:.3e})")]
    MarginalMismatch { residual: f64 },

    #[error("graph is not chordal")]
    NotChordal,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal {off:.3e})")]
    EigNotConverged { sweeps: usize, off: f64 },

    #[error("maximum-entropy solver stopped after {} iterations (marginal residual {:.3e})", .0.iterations, .0.marginal_residual)]
    NotConverged(Box<MaxentResult>),

    #[error("quadrature did not converge with {panels} panels (last change {change:.3e})")]
    QuadratureNotConverged { panels: usize, change: f64 },

    #[error("invalid Pauli letter {0:?}")]
    BadLetter(char),

    #[error("Pauli words have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
