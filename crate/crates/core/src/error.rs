use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a group: {0}")]
    NotAGroup(String),

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("quotient is not elementary abelian of 2-power order")]
    NotElementaryAbelianQuotient,

    #[error("group has no elementary abelian image of order 2^{rank}")]
    NoElementaryAbelianImage { rank: u32 },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("bad cardinality: expected {expected}, found {found}")]
    BadCardinality { expected: usize, found: usize },

    #[error("vector is not a 0/1 set indicator")]
    NotIndicator,

    #[error("set is not inverse-closed")]
    NotInverseClosed,

    #[error("sets are not disjoint")]
    NotDisjoint,

    #[error("difference set lambda {numerator}/{denominator} is not an integer")]
    NonIntegerLambda { numerator: i64, denominator: i64 },

    #[error("parameters ({v},{k},{lambda},{mu}) do not have integer eigenvalues")]
    NonIntegerRoots { v: i64, k: i64, lambda: i64, mu: i64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("set {0} in the list is not a verified partial difference set")]
    PdsNotVerified(usize),

    #[error("automorphism group has order {order}, above the materialization limit {limit}")]
    AutTooLarge { order: u128, limit: u128 },

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("malformed graph6: {0}")]
    MalformedGraph6(String),

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("row {row} has {found} entries, expected {expected}")]
    RowLengthMismatch { row: usize, expected: usize, found: usize },

    #[error("missing manifest in {0}")]
    MissingManifest(PathBuf),

    #[error("unknown group {0}")]
    UnknownGroup(String),

    #[error("corrupt record at line {line}: {reason}")]
    CorruptRecord { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
