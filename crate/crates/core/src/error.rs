//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failure modes reported by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An arithmetic operation left its domain (division by zero, square root
    /// of a negative number, a point outside the chart).
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// Malformed or inconsistent input data.
    #[error("invalid input: {0}")]
    Validation(String),

    /// The wind is not strictly shorter than one at the requested point, or no
    /// strongly convex region exists at all.
    #[error("strong convexity violated: {0}")]
    Convexity(String),

    /// Flagpole and transverse edge are (numerically) parallel.
    #[error("degenerate flag: {0}")]
    DegenerateFlag(String),

    /// A numerical decision fell inside its ambiguity margin.
    #[error("numerical degeneracy: {0}")]
    Degeneracy(String),

    /// The data does not belong to any admissible class.
    #[error("classification failed: {0}")]
    Classification(String),

    /// A shooting or root search ran out of budget.
    #[error("search failed: {0}")]
    Search(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { op, detail: detail.into() }
    }

    /// True for errors caused by the caller's data rather than by numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Validation(_) | Error::Classification(_) | Error::Convexity(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
