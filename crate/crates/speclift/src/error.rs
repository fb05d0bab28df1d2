//! Error types shared across the library.

use std::fmt;

/// Errors raised by the numerical kernels and the lifting machinery.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operands have incompatible dimensions.
    DimensionMismatch { expected: usize, got: usize },
    /// An input contained a NaN or infinite entry.
    NonFinite,
    /// An iteration failed to converge within its cap; usually signals
    /// ill-conditioned input.
    NonConvergence { what: &'static str },
    /// A matrix required to be invertible is numerically singular.
    Singular,
    /// No logarithm branch cut could be placed away from the spectrum.
    BranchFailure,
    /// Eigenvalue clusterings at the tolerance and at twice the tolerance
    /// disagree; the caller must adjust the clustering tolerance.
    AmbiguousClustering,
    /// Rank chains produced a non-monotone or inconsistent Weyr sequence.
    InconsistentRanks,
    /// The two matrices do not share a Jordan structure.
    NotSimilar,
    /// A cyclic matrix was required; `index` is the offending node when the
    /// failure comes from a multi-node instance.
    NotCyclic { index: Option<usize> },
    /// Random draws from the intertwiner space never produced an invertible
    /// element; signals near-degenerate conditioning.
    NoInvertibleSolution,
    /// Two interpolation nodes coincide.
    NodeCollision { first: usize, second: usize },
    /// Jet operands live at different base points or orders.
    BaseMismatch,
    /// Jordan structure extraction failed while evaluating the criterion.
    StructureFailure(Box<Error>),
    /// Precondition violated; the message names the offending field.
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NonFinite => write!(f, "non-finite entry in input"),
            Error::NonConvergence { what } => write!(f, "{what} did not converge"),
            Error::Singular => write!(f, "matrix is numerically singular"),
            Error::BranchFailure => {
                write!(f, "no branch cut available away from the spectrum")
            }
            Error::AmbiguousClustering => {
                write!(f, "eigenvalue clustering is ambiguous at the given tolerance")
            }
            Error::InconsistentRanks => {
                write!(f, "rank chain is inconsistent at the given tolerance")
            }
            Error::NotSimilar => write!(f, "matrices are not similar"),
            Error::NotCyclic { index: Some(j) } => {
                write!(f, "matrix at node {j} is not cyclic")
            }
            Error::NotCyclic { index: None } => write!(f, "matrix is not cyclic"),
            Error::NoInvertibleSolution => {
                write!(f, "no invertible intertwiner found within the draw budget")
            }
            Error::NodeCollision { first, second } => {
                write!(f, "interpolation nodes {first} and {second} coincide")
            }
            Error::BaseMismatch => write!(f, "jet base points or orders differ"),
            Error::StructureFailure(inner) => {
                write!(f, "Jordan structure extraction failed: {inner}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
