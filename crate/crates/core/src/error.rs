use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed node {text:?}: digit {digit} is not below branching {branching}")]
    MalformedNode {
        text: String,
        digit: u64,
        branching: u32,
    },

    #[error("cannot parse {text:?}: {reason}")]
    Parse { text: String, reason: String },

    #[error("node {node} does not fit in a tree of depth {depth}")]
    DepthExceeded { node: String, depth: usize },

    #[error("resource cap exceeded: {what} needs {needed}, cap is {cap}")]
    ResourceCap {
        what: &'static str,
        needed: String,
        cap: String,
    },

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("depth shortfall: need source depth {needed}, have {available}")]
    DepthShortfall { needed: usize, available: usize },

    #[error("consistency family is empty")]
    EmptyFamily,

    #[error("invalid parameter for {label}: {reason}")]
    InvalidParameter { label: String, reason: String },

    #[error("formula parse error at byte {position}: {message}")]
    FormulaSyntax { position: usize, message: String },

    #[error("unbound variable {0}")]
    UnboundVariable(String),

    #[error("unknown symbol {0}")]
    UnknownSymbol(String),

    #[error("arity mismatch for {symbol}: expected {expected}, got {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid structure: {0}")]
    Structure(String),

    #[error("invalid witness file: {0}")]
    WitnessFile(String),
}

impl Error {
    pub(crate) fn cap(what: &'static str, needed: impl ToString, cap: impl ToString) -> Self {
        Error::ResourceCap {
            what,
            needed: needed.to_string(),
            cap: cap.to_string(),
        }
    }

    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::ResourceCap { .. })
    }
}
