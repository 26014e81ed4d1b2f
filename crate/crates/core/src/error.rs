use thiserror::Error;

/// Errors produced by the group-algebra and state-combination routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("invalid element id {0}")]
    InvalidElement(usize),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid Cayley table: {0}")]
    InvalidCayleyTable(String),

    #[error("invalid irrep set: {0}")]
    InvalidIrreps(String),

    #[error("matrix dimension {dim} exceeds cap {cap}")]
    SizeCap { dim: usize, cap: usize },

    #[error("matrix is not block diagonal (off-block mass {residual:.3e})")]
    NotBlockDiagonal { residual: f64 },

    #[error("block for irrep `{irrep}` is not unitary (residual {residual:.3e})")]
    NonUnitaryBlock { irrep: String, residual: f64 },

    #[error("coefficients do not define a unitary (residual {residual:.3e})")]
    NonUnitaryCoefficients { residual: f64 },

    #[error("bad subsystem specification: {0}")]
    BadSubsystems(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("eigensolver did not converge")]
    EigenNonConvergence,

    #[error("normalization violated: {0}")]
    NormViolation(String),

    #[error("coefficients are outside the real/imaginary gauge (residual {residual:.3e})")]
    GaugeViolation { residual: f64 },

    #[error("parameter constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("zero weight makes a phase undefined (weights {weights:?})")]
    DegenerateWeight { weights: [f64; 3] },

    #[error("outer weight equals one; the inner combination is undetermined")]
    DegenerateOuterWeight,

    #[error("parameters do not correspond to a nested combination")]
    NotNested,

    #[error("third-order coefficients do not sum to zero (sum {sum:.3e})")]
    CoefficientSumNonzero { sum: f64 },

    #[error("bar lengths must be sorted ascending: {0:?}")]
    UnsortedLengths(Vec<f64>),

    #[error("format error: {0}")]
    Format(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input, unknown options, sizes outside supported limits.
    Usage,
    /// Well-formed input that violates a mathematical constraint.
    Domain,
    /// A checked identity failed: an implementation bug.
    Invariant,
}

impl ErrorClass {
    pub fn exit_code(self) -> u8 {
        match self {
            ErrorClass::Usage => 2,
            ErrorClass::Domain => 3,
            ErrorClass::Invariant => 4,
        }
    }
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            SizeMismatch { .. }
            | OutOfRange { .. }
            | InvalidElement(_)
            | InvalidPermutation(_)
            | InvalidCayleyTable(_)
            | InvalidIrreps(_)
            | SizeCap { .. }
            | BadSubsystems(_)
            | UnsortedLengths(_)
            | Format(_) => ErrorClass::Usage,
            NotBlockDiagonal { .. }
            | NonUnitaryBlock { .. }
            | NonUnitaryCoefficients { .. }
            | InvalidState(_)
            | NormViolation(_)
            | GaugeViolation { .. }
            | ConstraintViolation(_)
            | DegenerateWeight { .. }
            | DegenerateOuterWeight
            | NotNested
            | CoefficientSumNonzero { .. } => ErrorClass::Domain,
            EigenNonConvergence | InvariantViolation(_) => ErrorClass::Invariant,
        }
    }

    pub(crate) fn out_of_range(what: &'static str, detail: impl Into<String>) -> Self {
        Error::OutOfRange {
            what,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
