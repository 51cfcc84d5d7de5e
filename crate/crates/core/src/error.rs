use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (entry ({row}, {col}) differs from its transpose)")]
    NotSymmetric { row: usize, col: usize },

    #[error("parity violation at index {index}: chern entry must be congruent to the diagonal entry mod 2")]
    ParityViolation { index: usize },

    #[error("vector is not in the dual lattice (B·x is not integral at index {index})")]
    NotInDualLattice { index: usize },

    #[error("vector is not a characteristic solution of B mod 2")]
    NotCharacteristicSolution,

    #[error("group element out of range")]
    ElementOutOfRange,

    #[error("invalid invariant factors: {0}")]
    InvalidGroup(String),

    #[error("value table does not define a quadratic function: {0}")]
    NotQuadratic(String),

    #[error("group order {order} exceeds the cap {cap}")]
    OrderCapExceeded { order: u128, cap: u64 },

    #[error("invalid move: {0}")]
    InvalidMove(String),

    #[error("matrix is degenerate; the Spin^c set is infinite")]
    DegenerateMatrix,

    #[error("invalid lens space parameters p={p}, q={q}")]
    InvalidLens { p: i64, q: i64 },

    #[error("the lens census formula is only stated for odd p (got p={0})")]
    EvenModulus(u64),

    #[error("{value} is not invertible mod {modulus}")]
    NotInvertible { value: i64, modulus: u64 },

    #[error("norm did not reduce to a rational number")]
    NonRationalNorm,

    #[error("integer {0} does not fit the machine word used for group arithmetic")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
