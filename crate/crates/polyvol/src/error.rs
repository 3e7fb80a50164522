use std::fmt;

/// Errors shared by every module of the crate.
///
/// The variants mirror the failure modes of exact geometry rather than of
/// I/O: inputs are rejected for structural reasons (wrong shape, singular
/// system, unbounded region, missing certificate), never for numerical ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Shapes of the operands do not line up.
    Dimension(String),
    /// A matrix that had to be invertible is not.
    Singular(String),
    /// A matrix does not have the full rank an operation requires.
    Rank(String),
    /// Input outside the mathematical domain of the operation
    /// (non-integer entries, non-positive weights, zero rows, ...).
    Domain(String),
    /// A genericity certificate failed or could not be established.
    Certificate(String),
    /// The feasible region has a recession direction.
    Unbounded(String),
    /// Degenerate geometry: non-simple vertex, empty or lower-dimensional
    /// region where a full-dimensional one is required.
    Degenerate(String),
    /// A combinatorial size cap was exceeded.
    Size(String),
    /// Malformed textual input.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(s) => write!(f, "dimension mismatch: {s}"),
            Error::Singular(s) => write!(f, "singular matrix: {s}"),
            Error::Rank(s) => write!(f, "rank deficient: {s}"),
            Error::Domain(s) => write!(f, "domain error: {s}"),
            Error::Certificate(s) => write!(f, "certificate error: {s}"),
            Error::Unbounded(s) => write!(f, "unbounded region: {s}"),
            Error::Degenerate(s) => write!(f, "degenerate geometry: {s}"),
            Error::Size(s) => write!(f, "size cap exceeded: {s}"),
            Error::Parse(s) => write!(f, "parse error: {s}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
