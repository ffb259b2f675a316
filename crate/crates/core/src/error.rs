use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("negative valuation {0}")]
    NegativeValuation(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("representation is not normalized")]
    NotNormalized,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("points coincide")]
    SamePoint,
    #[error("residue extension required: nonsplit factors of degree {0:?}")]
    ResidueExtensionRequired(Vec<usize>),
    #[error("undefined at an id-indifferent point")]
    IdIndifferentUndefined,
    #[error("point is not id-indifferent")]
    NotIdIndifferent,
    #[error("not a fixed point")]
    NotFixed,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("weights sum to {found}, expected {expected} (residual {residual})")]
    IncompleteEnumeration { found: i64, expected: i64, residual: i64 },
    #[error("iteration cap {0} exceeded")]
    CapExceeded(usize),
    #[error("cross-check failure: {0}")]
    CrossCheckFailure(String),
    #[error("identity violation: {0}")]
    IdentityViolation(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("degenerate map: {0}")]
    DegenerateMap(String),
    #[error("invalid residue field: {0}")]
    InvalidField(String),
    #[error("inseparable polynomial: roots cannot be separated by derivative gcd")]
    Inseparable,
    #[error("roots could not be separated within the refinement budget")]
    Unresolved,
}

impl Error {
    /// Process exit code used by the command line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResidueExtensionRequired(_) => 2,
            Error::CrossCheckFailure(_) => 3,
            _ => 1,
        }
    }
}
