use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("not a unit at this precision")]
    NotAUnit,
    #[error("insufficient precision")]
    InsufficientPrecision,
    #[error("invalid p-adic value: {0}")]
    InvalidPadic(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("set not contained in group")]
    NotInGroup,
    #[error("element not in group: {0:?}")]
    UnknownElement(Vec<u64>),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),
    #[error("empty sample")]
    EmptySample,
    #[error("sample length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("net missed {} members: {}", .0.len(), .0.join(", "))]
    NetMissed(Vec<String>),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code for the CLI: 2 config, 3 verification, 4 resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded(_) => 4,
            Error::Verification(_) | Error::NetMissed(_) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
