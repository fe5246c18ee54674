use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KdError {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("degenerate state: amplitude vector has norm {norm:e}")]
    DegenerateState { norm: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("basis is not orthonormal (defect {defect:e})")]
    NonOrthonormalBasis { defect: f64 },

    #[error("observable is degenerate: eigenvalues {i} and {k} coincide")]
    DegenerateObservable { i: usize, k: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("bases are not mutually non-orthogonal: |<f_{j}|a_{i}>| = {overlap:e}")]
    NonInvertible { i: usize, j: usize, overlap: f64 },

    #[error("corrupt KD table: marginal imaginary residue {residual:e}")]
    CorruptTable { residual: f64 },

    #[error("impossible postselection: probability {probability:e} under the dephased state")]
    ImpossiblePostselection { probability: f64 },

    #[error("orthogonal postselection: p(f_j|rho) = {probability:e}")]
    OrthogonalPostselection { probability: f64 },

    #[error("decoherence factor {0} outside [0, 1]")]
    InvalidDecoherence(f64),

    #[error("invalid pointer configuration: {0}")]
    InvalidPointer(String),

    #[error("grid point {index}: {source}")]
    AtGridPoint {
        index: usize,
        #[source]
        source: Box<KdError>,
    },
}

pub type Result<T> = std::result::Result<T, KdError>;
