use thiserror::Error;

/// Failures while building a group from a multiplication table.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group order must be positive")]
    Empty,
    #[error("multiplication table is not square: row {row} has {len} entries, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("table entry ({row}, {col}) = {value} is not an element index")]
    IndexOutOfRange { row: usize, col: usize, value: usize },
    #[error("not a Latin square: {axis} {index} repeats element {value}")]
    NotLatinSquare { axis: &'static str, index: usize, value: usize },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {0} has no two-sided inverse")]
    MissingInverse(usize),
    #[error("associativity fails: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("operands live over different groups")]
    GroupMismatch,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("composition is not zero: {0}")]
    NonzeroComposition(String),
    #[error("degree {degree} out of range 0..={top}")]
    DegreeOutOfRange { degree: usize, top: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("complex is not an algebraic 5-complex: {0}")]
    NotAlg5(String),
    #[error("complex is not in dual form: {0}")]
    NotDualForm(String),
    #[error("no lift exists: {0}")]
    NoLift(String),
    #[error("end scalars ({x}, {y}) are not (1, -1) up to global sign")]
    EndScalars { x: String, y: String },
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
