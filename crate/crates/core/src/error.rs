use thiserror::Error;

/// Errors produced by the library. CLI exit codes are derived from the
/// variant via [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("formula syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("vertex {vertex} is out of range (graph has {n} vertices)")]
    DanglingVertex { vertex: usize, n: usize },

    #[error("duplicate edge id {0}")]
    DuplicateEdge(usize),

    #[error("ordering is not a permutation of the vertex set: {0}")]
    NotAPermutation(String),

    #[error("cut index {index} out of range 1..{max}")]
    CutOutOfRange { index: usize, max: usize },

    #[error("slices cannot be glued: {0}")]
    NotGlueable(String),

    #[error("invalid slice: {0}")]
    InvalidSlice(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("invalid semigroup: {0}")]
    InvalidSemigroup(String),

    #[error("slice graph is cyclic")]
    Cyclic,

    #[error("slice graph is not deterministic: {0}")]
    NotDeterministic(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("not a bidirected tree: {0}")]
    NotBidirectedTree(String),

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("directed vertex separation number exceeds budget {0}")]
    BudgetExceeded(usize),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("audit failed: {0}")]
    Audit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) | Error::BudgetExceeded(_) => 3,
            Error::Audit(_) => 4,
            Error::Parse { .. }
            | Error::Syntax { .. }
            | Error::UnboundVariable(_)
            | Error::DanglingVertex { .. }
            | Error::DuplicateEdge(_) => 5,
            Error::Io(_) => 6,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
