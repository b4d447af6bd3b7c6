use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("constraint on (X{i}, X{j}) has an empty label")]
    EmptyLabel { i: usize, j: usize },
    #[error("variable index {index} out of range for a network over X0..X{max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("constraint on (X{0}, X{0}) relates a variable to itself")]
    DiagonalConstraint(usize),
    #[error("networks have different sizes ({left} vs {right} variables)")]
    DimensionMismatch { left: usize, right: usize },
    #[error("label on (X{i}, X{j}) is not convex")]
    NotAnStp { i: usize, j: usize },
    #[error("domain of X{0} is not a singleton")]
    NotSingleton(usize),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("invalid scheduling instance: {0}")]
    InvalidInstance(String),
    #[error("domain of X{0} is not of the form [a,b] or [a,+inf) with 0 <= a")]
    MalformedDomain(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
