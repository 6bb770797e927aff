use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: ‖H − H†‖_F = {residual:.3e}")]
    NonHermitian { residual: f64 },
    #[error("matrix is not symmetric: ‖S − Sᵀ‖_F = {residual:.3e}")]
    NotSymmetric { residual: f64 },
    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("trace is {trace:.12}, expected 1")]
    BadTrace { trace: f64 },
    #[error("density matrix invalid: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidDensity(Vec<Error>),
    #[error("state is not normalized: ‖ψ‖ = {norm:.12}")]
    NotNormalized { norm: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },
    #[error("columns are not orthonormal: ‖T†T − I‖_F = {residual:.3e}")]
    NotIsometry { residual: f64 },
    #[error("Schmidt coefficients differ: λ₂ = {a:.12} vs {b:.12}")]
    SchmidtMismatch { a: f64, b: f64 },
    #[error("target weights sum to {sum:.12} > 1")]
    TargetWeightsExceedOne { sum: f64 },
    #[error("transformation infeasible: {0}")]
    Infeasible(String),
    #[error("requested probability {requested:.12} exceeds the maximum {maximum:.12}")]
    ProbabilityTooHigh { requested: f64, maximum: f64 },
    #[error("optimal decomposition failed: {0}")]
    ConstructionFailed(String),
    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),
    #[error("ensemble size {m} is smaller than rank {rank} (or above the cap of 8)")]
    RankExceedsM { rank: usize, m: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
