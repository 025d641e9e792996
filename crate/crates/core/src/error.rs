use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed bit string literal {0:?}")]
    MalformedBits(String),
    #[error("malformed self-delimiting encoding at bit {position}")]
    MalformedEncoding { position: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("input of {len} bits exceeds the configured limit of {limit}")]
    InputTooLong { len: usize, limit: usize },
    #[error("space level {level} is outside the schedule range [{min}, {max}]")]
    LevelOutOfRange { level: i32, min: i32, max: i32 },
    #[error("enumeration budget of {quota} steps exhausted")]
    BudgetExceeded { quota: u64 },
    #[error("no program of length <= {l_max} produces the target")]
    NoProgram { l_max: usize },
    #[error("no table passed certification after {attempts} attempts")]
    SearchExhausted { attempts: u64 },
    #[error("Bob did not stop by round {rounds}")]
    ReconciliationExhausted { rounds: usize },
    #[error("round {round} exceeds the extractor's certified prefix length {certified}")]
    PrefixNotCertified { round: usize, certified: usize },
    #[error("malformed transcript: {0}")]
    MalformedTranscript(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed file: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
