use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid prime {0}: an odd prime is required")]
    InvalidPrime(u64),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("element is not invertible at the tracked precision")]
    NotInvertible,
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("decomposition data requested at q = p = {0}")]
    QEqualsP(u64),
    #[error("irreducible enumeration incomplete: sum of squared dimensions {found}, group order {expected}")]
    CompletenessFailure { found: u64, expected: u64 },
    #[error("missing Hecke coefficient a_{0}")]
    MissingCoefficient(u64),
    #[error("unsupported prime {0} for a local Euler factor")]
    UnsupportedPrime(u64),
    #[error("Euler ratio denominator vanishes at q = {0} at the working precision")]
    DivisionByIndeterminate(u64),
    #[error("bad Kummer base a = {0}: {1}")]
    BadKummerBase(i64, String),
    #[error("curve has bad reduction at {0}")]
    BadReduction(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("inconsistent special data at q = {q}: a_q = {a_q}, delta = {delta}")]
    InconsistentSpecialData { q: u64, a_q: i64, delta: i8 },
    #[error("I/O error: {0}")]
    Io(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for precision problems, 3 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PrecisionExhausted(_) | Error::NotInvertible | Error::DivisionByIndeterminate(_) => 2,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
