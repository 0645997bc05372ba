use std::fmt;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed textual input (word literals, rationals, vector files, CLI specs).
    Parse(String),
    /// An operation received data at the wrong level or rank.
    LevelMismatch(String),
    /// A vector fails the polytope membership conditions required by an operation.
    NotInPolytope(String),
    /// The vector is a valid polytope point but not realizable by a cyclic word.
    NotRealizable(String),
    /// A configured resource cap (window size, vertex count, witness length) was exceeded.
    BudgetExceeded(String),
    /// An internal invariant that must hold on valid input was violated.
    InvariantViolation(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::LevelMismatch(msg) => write!(f, "level mismatch: {msg}"),
            Error::NotInPolytope(msg) => write!(f, "not a polytope point: {msg}"),
            Error::NotRealizable(msg) => write!(f, "not realizable: {msg}"),
            Error::BudgetExceeded(msg) => write!(f, "budget exceeded: {msg}"),
            Error::InvariantViolation(msg) => write!(f, "invariant violation: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
