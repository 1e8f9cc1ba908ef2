use thiserror::Error;

/// Errors raised while building or propagating quantum and oscillator systems.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |H_ij - conj(H_ji)| = {deviation:e} exceeds {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("bad dimension: {0}")]
    BadDimension(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis is incomplete: {elements} elements for dimension {dim} (need {needed})")]
    IncompleteBasis {
        dim: usize,
        elements: usize,
        needed: usize,
    },

    #[error("density matrix is not pure: Tr(rho^2) = {purity}")]
    NotPure { purity: f64 },

    #[error("all diagonal elements are below the phase anchor tolerance {tol:e}")]
    ZeroAnchor { tol: f64 },

    #[error(
        "basis is not Hermitian: generator element ({row}, {col}) has imaginary part {residue:e}"
    )]
    NonHermitianBasis {
        row: usize,
        col: usize,
        residue: f64,
    },

    #[error("matrix is not antisymmetric: max |A_ij + A_ji| = {deviation:e}")]
    NotAntisymmetric { deviation: f64 },

    #[error("matrix is not symmetric: max |A_ij - A_ji| = {deviation:e}")]
    NotSymmetric { deviation: f64 },

    #[error("eigenvalue {eigenvalue:e} is positive beyond tolerance {tol:e}")]
    PositiveEigenvalue { eigenvalue: f64, tol: f64 },

    #[error("integration step {step:e} exceeds the stability limit {limit:e}")]
    StepTooLarge { step: f64, limit: f64 },

    #[error("ensemble is empty")]
    EmptyEnsemble,

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("time constant {name} must be positive, got {value}")]
    NonPositiveTimeConstant { name: &'static str, value: f64 },

    #[error("bad density matrix: {0}")]
    BadDensityMatrix(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
