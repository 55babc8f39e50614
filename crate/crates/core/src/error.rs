use std::fmt;

use thiserror::Error;

/// One finding from [`crate::presentation::validate_presentation`] or from
/// decoding a presentation document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    /// A coefficient vector has the wrong length.
    DimensionMismatch {
        table: &'static str,
        key: (usize, usize),
        expected: usize,
        found: usize,
    },
    /// An index falls outside its basis.
    IndexOutOfRange {
        table: &'static str,
        basis: &'static str,
        index: i64,
        bound: usize,
    },
    /// An `ee` key with `i >= j`.
    NonIncreasingPair { i: i64, j: i64 },
    /// The same product slot appears twice in a document.
    DuplicateEntry {
        table: &'static str,
        entry: [i64; 3],
    },
    /// Header dimensions are unusable.
    BadHeader(String),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::DimensionMismatch {
                table,
                key,
                expected,
                found,
            } => write!(
                f,
                "{table} entry ({},{}) has {found} coefficients, expected {expected}",
                key.0, key.1
            ),
            Diagnostic::IndexOutOfRange {
                table,
                basis,
                index,
                bound,
            } => write!(f, "{table}: {basis} index {index} outside 1..={bound}"),
            Diagnostic::NonIncreasingPair { i, j } => {
                write!(f, "ee: pair ({i},{j}) must satisfy i < j")
            }
            Diagnostic::DuplicateEntry { table, entry } => write!(
                f,
                "{table}: duplicate entry [{}, {}, {}]",
                entry[0], entry[1], entry[2]
            ),
            Diagnostic::BadHeader(msg) => write!(f, "header: {msg}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid format ({m},{n}): both entries must be at least 1")]
    InvalidFormat { m: i64, n: i64 },

    #[error("cannot parse class label {0:?}")]
    ParseLabel(String),

    #[error("cannot parse format {0:?}")]
    ParseFormat(String),

    #[error("{class} does not fit format {format}: {reason}")]
    DimensionMismatch {
        class: String,
        format: String,
        reason: String,
    },

    #[error("unknown arrangement {0}")]
    UnknownArrangement(String),

    #[error("rank profile ({0},{1},{2}) is not supported")]
    UnsupportedProfile(usize, usize, usize),

    #[error("link option t1={t1}, phi2={phi2} is not supported")]
    UnsupportedSpec { t1: usize, phi2: bool },

    #[error("link option mismatch: {0}")]
    Phi2Mismatch(String),

    #[error("{rule} does not apply to {class} at {format}: {reason}")]
    PreconditionViolated {
        rule: String,
        class: String,
        format: String,
        reason: String,
    },

    #[error("invalid presentation: {}", join(.0))]
    InvalidDocument(Vec<Diagnostic>),

    #[error("format {0} is outside the domain of the family schedule")]
    OutOfDomain(String),

    #[error("unsupported document version {0}")]
    Version(u32),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn join(ds: &[Diagnostic]) -> String {
    ds.iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
