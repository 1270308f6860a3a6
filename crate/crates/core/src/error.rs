use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown operation symbol `{0}`")]
    UnknownOp(String),
    #[error("operation `{op}` expects {expected} arguments, got {found}")]
    ArityMismatch {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("variable v{0} has no assigned value")]
    UnassignedVariable(usize),
    #[error("element {element} is outside the universe of size {size}")]
    OutOfRange { element: usize, size: usize },
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("partition is not a congruence: {0}")]
    NotACongruence(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("boxmap classes do not match: {0}")]
    ClassMismatch(String),
    #[error("not a decomposition operation: {0}")]
    NotADecomposition(String),
    #[error("class {0} has no verified coordinatization")]
    NotCoordinatized(usize),
    #[error("sorted algebra is not strongly abelian: {0}")]
    NotStronglyAbelian(String),
    #[error("the flat algebra is essentially unary")]
    EssentiallyUnary,
    #[error("no termination after {0} rewriting steps")]
    NonTermination(usize),
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("free algebra does not embed into the quotient: {0}")]
    EmbeddingFailure(String),
    #[error("the fresh generator is not isolated modulo theta: {0}")]
    IsolationFailure(String),
    #[error("the constants 0,1,2,3 are not pairwise distinct: {0}")]
    NotDistinct(String),
    #[error("closure failure: {0}")]
    ClosureFailure(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
