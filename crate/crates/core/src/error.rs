use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported prime {0}; supported primes are 2, 3 and 5")]
    UnsupportedPrime(u32),
    #[error("unsupported rank n = {0}; n must be at least 2")]
    UnsupportedRank(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("field mismatch: GF({left}) vs GF({right})")]
    FieldMismatch { left: u8, right: u8 },
    #[error("{what} = {value} is out of range ({allowed})")]
    OutOfRange {
        what: &'static str,
        value: i64,
        allowed: String,
    },
    #[error("(n, p) = ({n}, {p}) is outside the feasibility grid for {what}")]
    Infeasible { n: usize, p: u8, what: &'static str },
    #[error("expected {expected} points, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("subspace is not totally isotropic")]
    NotIsotropic,
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("not a symplectic embedding: {0}")]
    NotEmbedding(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal defect: {0}")]
    Defect(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}

impl Error {
    pub(crate) fn out_of_range(what: &'static str, value: i64, allowed: impl Into<String>) -> Self {
        Error::OutOfRange {
            what,
            value,
            allowed: allowed.into(),
        }
    }
}
