use thiserror::Error;

/// Coarse classification of failures, used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or inconsistent input (dimensions, parse-level problems).
    Usage,
    /// A modelling assumption does not hold for the supplied system/data.
    Assumption,
    /// A numerical procedure failed (singularity, non-convergence).
    Numerical,
}

#[derive(Debug, Error)]
pub enum DoaError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not symmetric: {0}")]
    NotSymmetric(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error(
        "Schur instability: the discrete Lyapunov solution is not positive definite, so the \
         linearization at the origin has an eigenvalue on or outside the unit circle"
    )]
    SchurInstability,

    #[error("no unique solution: {0}")]
    SingularSystem(String),

    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("epsilon {epsilon} must be smaller than the minimum eigenvalue {lambda_min_q} of Q")]
    EpsilonTooLarge { epsilon: f64, lambda_min_q: f64 },

    #[error("the origin is not an equilibrium: |f(0)| = {norm:e} exceeds 1e-12")]
    NotEquilibrium { norm: f64 },

    #[error("system provides no interval Hessian for component {component}")]
    MissingHessian { component: usize },

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("invalid hyper-rectangle: {0}")]
    InvalidHyperRect(String),

    #[error("invalid level function: {0}")]
    InvalidLevelFunction(String),

    #[error("box is not contained in the safe set: {0}")]
    UnsafeBox(String),

    #[error("certified level collapsed to zero: {0}")]
    LevelCollapsed(String),

    #[error("unknown system '{0}' (available: two_machine, cart_pole)")]
    UnknownSystem(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl DoaError {
    pub fn class(&self) -> ErrorClass {
        use DoaError::*;
        match self {
            DimensionMismatch(_)
            | NotSymmetric(_)
            | NonFinite(_)
            | NotPositiveDefinite(_)
            | MissingHessian { .. }
            | InvalidInterval(_)
            | InvalidHyperRect(_)
            | InvalidLevelFunction(_)
            | UnknownSystem(_)
            | InvalidArgument(_) => ErrorClass::Usage,
            SchurInstability | EpsilonTooLarge { .. } | NotEquilibrium { .. } | UnsafeBox(_) => {
                ErrorClass::Assumption
            }
            SingularSystem(_) | NonConvergence(_) | LevelCollapsed(_) => ErrorClass::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, DoaError>;
