use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field order {0} is not a prime")]
    NotPrime(u32),

    #[error("no inverse for zero")]
    NoInverse,

    #[error("entry {value} is outside the field F_{q}")]
    EntryOutOfRange { value: u32, q: u32 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("inconsistent linear system")]
    Inconsistent,

    #[error("client {client} requires message {index}, but only {m} messages exist")]
    IndexOutOfRange { client: usize, index: usize, m: usize },

    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("client {0} cannot decode any required message")]
    NotDecodable(usize),

    #[error("round {round} satisfied no client ({active} still active)")]
    NoProgress { round: usize, active: usize },

    #[error("bin {bin} exceeded {cap} rows with {unsatisfied} clients still unsatisfied")]
    IterationCap { bin: usize, cap: usize, unsatisfied: usize },

    #[error("search budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u128 },

    #[error("no solution within the limit {0}")]
    ExceedsLimit(usize),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
