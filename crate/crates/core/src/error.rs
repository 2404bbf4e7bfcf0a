use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("qubit count {n} exceeds the limit of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("state needs at least one qubit")]
    NoQubits,

    #[error("amplitude vector is zero")]
    ZeroVector,

    #[error("state norm {0} is too far from 1 to renormalize")]
    NotNormalized(f64),

    #[error("amplitude {0} is not finite")]
    NonFinite(usize),

    #[error("label {label} is outside 1..={n}")]
    LabelOutOfRange { label: usize, n: usize },

    #[error("duplicate label {0}")]
    DuplicateLabel(usize),

    #[error("subsystem is empty")]
    EmptySubsystem,

    #[error("block must be a proper nonempty subset of the {n} qubits, got size {size}")]
    VacuousBlock { size: usize, n: usize },

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensity(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-Hermitian input: imaginary residue {0:e} in Pauli coefficient")]
    NonHermitian(f64),

    #[error("criterion and oracle disagree on block {block}: criterion residual {residual:e}, second singular value {second:e}")]
    Disagreement {
        block: String,
        residual: f64,
        second: f64,
    },

    #[error("numerical routes disagree: {0}")]
    Numerical(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("coefficients are required for conditional support {0}")]
    CoefficientsRequired(String),
}

pub type Result<T> = std::result::Result<T, Error>;
