use alloc::string::String;
use core::fmt;

/// Errors surfaced by lattice, solver and experiment operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vertex or argument lies outside its domain.
    Domain(String),
    /// A parameter violates its contract (λ ≤ 0, bad ε, ...).
    Param(String),
    /// A precondition of an operation does not hold (mismatched domains,
    /// non-grid-aligned boundary data, ...).
    Precondition(String),
    /// The requested computation exceeds a configured resource budget.
    Resource(String),
    /// No finite-energy configuration exists on the searched set.
    Infeasible(String),
    /// An iterative solver failed to reach its residual target.
    Solver(String),
    /// An experiment or run configuration is invalid.
    Config(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Param(m) => write!(f, "parameter error: {m}"),
            Error::Precondition(m) => write!(f, "precondition error: {m}"),
            Error::Resource(m) => write!(f, "resource error: {m}"),
            Error::Infeasible(m) => write!(f, "infeasible: {m}"),
            Error::Solver(m) => write!(f, "solver error: {m}"),
            Error::Config(m) => write!(f, "config error: {m}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
