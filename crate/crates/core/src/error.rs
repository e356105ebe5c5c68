use std::path::PathBuf;

use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A metric was asked to score an empty sentence or token sequence.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// A scorer or metric identifier that is not one of the builtins.
    #[error("unknown metric name `{0}` (expected bleu1|bleu4|rouge1|rougeL|meteor|chrf)")]
    UnknownMetric(String),

    /// A matching algorithm identifier that is not recognized.
    #[error("unknown matching algorithm `{0}` (expected draft_greedy|final_greedy|match_and_cover)")]
    UnknownAlgorithm(String),

    /// An external score-matrix file could not be parsed.
    #[error("score matrix {path}: {message}")]
    MatrixFormat { path: PathBuf, message: String },

    /// An external score matrix does not match the sentence lists it scores.
    #[error(
        "score matrix {path} is {found_rows}x{found_cols} but the sentence lists are {expected_rows}x{expected_cols}"
    )]
    MatrixDimensions {
        path: PathBuf,
        found_rows: usize,
        found_cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },

    /// The scorer kind cannot drive the requested operation.
    #[error("{0}")]
    UnsupportedScorer(String),

    /// A record line failed to parse or validate.
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },

    /// A record is structurally invalid independent of its source line.
    #[error("record `{id}`: {message}")]
    InvalidRecord { id: String, message: String },

    /// An operation that requires labels met a record without them.
    #[error("record `{0}` has no labels")]
    Unlabeled(String),

    /// A configuration value is out of range or malformed.
    #[error("invalid config: {0}")]
    Config(String),

    /// `remove_lcs` was given a sequence that is not a subsequence of the target.
    #[error("sequence is not a subsequence of the target")]
    NotSubsequence,

    /// Two aligned lists had different lengths.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// Fewer records than a split can honor.
    #[error("too few records to split: {0} (need at least 10)")]
    TooFewRecords(usize),

    /// A contingency table with fewer than two non-zero rows or columns.
    #[error("degenerate contingency table: fewer than two non-zero rows or columns remain")]
    DegenerateTable,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
