use thiserror::Error;

pub type Result<T> = std::result::Result<T, SpinError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpinError {
    #[error("register of {n} qubits is outside the supported range 1..={max}")]
    RegisterSize { n: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("qubit index {index} is out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("qubit index {0} appears more than once")]
    RepeatedIndex(usize),

    #[error("invalid bitstring {0:?}")]
    InvalidBits(String),

    #[error("at least {needed} spins are required, got {got}")]
    TooFewSpins { needed: usize, got: usize },

    #[error("dense dimension {dim} exceeds the cap {cap}")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("Krylov exponential did not converge: error estimate {estimate:e} > tolerance {tolerance:e} after {substeps} substeps")]
    KrylovNonConvergence {
        estimate: f64,
        tolerance: f64,
        substeps: usize,
    },

    #[error("control qubit {0} lies in the support of the evolved operator")]
    ControlInSupport(usize),

    #[error("initial magnetization is zero, contrast is undefined")]
    ZeroMagnetization,

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl SpinError {
    /// True for errors raised by the numerics rather than by bad input.
    pub fn is_computational(&self) -> bool {
        matches!(
            self,
            SpinError::KrylovNonConvergence { .. } | SpinError::ZeroNorm
        )
    }
}
