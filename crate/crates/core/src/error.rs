use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variable count mismatch: {0} vs {1}")]
    VariableMismatch(usize, usize),
    #[error("cannot raise precision from {from} to {to}")]
    PrecisionIncrease { from: u32, to: u32 },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("vectors do not form a basis: {0}")]
    NotABasis(String),
    #[error("basis does not diagonalize the filtrations")]
    NotDiagonalizing,
    #[error("filtrations are not simultaneously diagonalizable modulo t^{level}")]
    NotDiagonalizableMod { level: u32 },
    #[error("change of basis leaves the constrained group at entry ({row}, {col})")]
    NotInTorsor { row: usize, col: usize },
    #[error("vertices {0:?} do not span a declared simplex")]
    IncidenceViolation(Vec<usize>),
    #[error("{0:?} is not a simplex of the complex")]
    NotASimplex(Vec<usize>),
    #[error("nesting violated: {0}")]
    NestingViolated(String),
    #[error("extracted sections do not form a graded basis: {0}")]
    NotGradedBasis(String),
    #[error("filtration is not compatible with the weight decomposition: {0}")]
    NotWeightCompatible(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
