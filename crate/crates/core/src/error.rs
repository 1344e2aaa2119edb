use std::fmt;

use thiserror::Error;

/// Which oracle ran out of queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    /// The challenge oracle `E`.
    Challenge,
    /// The cipher oracles `F` / `F^-1` (shared budget).
    Cipher,
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleKind::Challenge => f.write_str("E"),
            OracleKind::Cipher => f.write_str("F/F^-1"),
        }
    }
}

/// Snapshot of the budget at the moment a run was aborted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetReport {
    pub oracle: OracleKind,
    pub q_used: u64,
    pub q_max: u64,
    pub t_used: u64,
    pub t_max: u64,
}

impl fmt::Display for BudgetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} budget exhausted (q {}/{}, t {}/{})",
            self.oracle, self.q_used, self.q_max, self.t_used, self.t_max
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{what} {value:#x} outside [0, 2^{bits})")]
    Domain { what: &'static str, value: u64, bits: u32 },

    #[error("move {index} beyond transcript of {len} moves")]
    MoveIndex { index: usize, len: usize },

    #[error("{0}")]
    Budget(BudgetReport),

    #[error("adversary exceeded its budget: {0}")]
    BudgetViolation(BudgetReport),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for both the soft (oracle refused a query) and the hard (run
    /// aborted) budget errors.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_) | Error::BudgetViolation(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
