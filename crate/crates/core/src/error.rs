use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Operands belong to structurally incompatible groups (rank mismatch etc.).
    #[error("structural error: {0}")]
    Structure(String),

    /// A precondition on the arguments was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The node budget ran out before the search could prove a value.
    /// Carries the best bounds established so far (both inclusive).
    #[error("search inconclusive: node budget exhausted (BO is in [{lower}, {upper}])")]
    BudgetExhausted { lower: u64, upper: u64 },

    /// An exhaustive search was requested for a group too large to finish
    /// in reasonable time and no node budget was given.
    #[error("group of order {order} is too large for exhaustive search; pass a node budget to search anyway")]
    SearchTooLarge { order: u64 },

    /// A construction that is guaranteed to produce a valid witness failed
    /// its self-check. Always indicates an implementation bug.
    #[error("internal error: {0}")]
    Internal(String),

    /// An exhaustively computed value contradicts a proved closed-form value.
    /// Always indicates an implementation bug; the message carries a dump of
    /// the offending case.
    #[error("theorem contradiction (implementation bug): {0}")]
    TheoremContradiction(String),

    /// Cache file problems: unreadable, bad version, failed row validation.
    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
