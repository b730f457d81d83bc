use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("amplitude vector has length {got}, expected 2^{n_qubits} = {expected}")]
    LengthMismatch {
        n_qubits: usize,
        expected: usize,
        got: usize,
    },
    #[error("state vector has (near-)zero norm {norm:e}")]
    ZeroVector { norm: f64 },
    #[error("amplitude {index} is not finite")]
    NonFinite { index: usize },
    #[error("unsupported number of qubits {n}: {reason}")]
    BadArity { n: usize, reason: &'static str },
    #[error("the measure is defined for an even number of qubits only (got {n})")]
    OddArity { n: usize },
    #[error("register size {n} exceeds the supported maximum {max}")]
    ArityTooLarge { n: usize, max: usize },
    #[error("cannot build a tensor product of an empty list")]
    EmptyList,
    #[error("target qubit {target} out of range for a {n_qubits}-qubit state")]
    TargetOutOfRange { target: usize, n_qubits: usize },
    #[error("subset mask {mask:#b} does not fit in {n_qubits} qubits")]
    MaskOutOfRange { mask: u64, n_qubits: usize },
    #[error("subset is empty")]
    EmptySubset,
    #[error("subset covers the whole register")]
    FullSubset,
    #[error("subset of size {size} is too small (need at least 2)")]
    SubsetTooSmall { size: usize },
    #[error("subset {subset:#b} is not contained in {superset:#b}")]
    NotASubset { subset: u64, superset: u64 },
    #[error("factorization does not cover the {n_qubits}-qubit register")]
    FactorizationMismatch { n_qubits: usize },
    #[error("operator determinant {det} is not 1 (|det - 1| = {deviation:e})")]
    NotDet1 { det: num_complex::Complex64, deviation: f64 },
    #[error("operator pair is not a POVM: |M1'M1 + M2'M2 - I| = {deviation:e}")]
    NotAPovm { deviation: f64 },
    #[error("tolerance {tol:e} outside (0, 1e-3)")]
    BadTolerance { tol: f64 },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("all four arguments are zero")]
    AllZero,
    #[error("field strength must be finite and non-negative (got {h})")]
    BadField { h: f64 },
    #[error("invalid field grid: {0}")]
    BadGrid(String),
    #[error("requested {k} eigenpairs, supported range is 1..={max}")]
    BadEigenCount { k: usize, max: usize },
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },
    #[error("could not parse state: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
