use thiserror::Error;

use crate::tuples::ValidityLevel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not Hermitian (‖A − A*‖_F = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },
    #[error("operator is not a contraction (norm {norm:e})")]
    NotContraction { norm: f64 },
    #[error("target is not in the range (residual {residual:e})")]
    NotInRange { residual: f64 },
    #[error("tuple is invalid for this operation (validity level {level:?})")]
    InvalidTuple { level: ValidityLevel },
    #[error("tuple lacks full validity (0 ⪯ D ⪯ I required)")]
    NotFullValidity,
    #[error("defect operator vanishes but the target is nonzero")]
    ZeroDefect,
    #[error("spectral subspace is empty")]
    EmptySubspace,
    #[error("subspace is not uniformly positive (δ* = {delta:e})")]
    NotUniformlyPositive { delta: f64 },
    #[error("subspace basis is linearly dependent")]
    DegenerateBasis,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
