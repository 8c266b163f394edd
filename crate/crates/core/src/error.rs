use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid tree signature: {0}")]
    InvalidSignature(String),

    #[error("depth {depth} out of range for horizon {horizon}")]
    DepthOutOfRange { depth: usize, horizon: usize },

    #[error("invalid vertex address: {0}")]
    InvalidAddress(String),

    #[error("signature mismatch")]
    SignatureMismatch,

    #[error("enumeration exceeded cap of {cap} elements")]
    CapExceeded { cap: usize },

    #[error("not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("not a normal subgroup: {0}")]
    NotNormal(String),

    #[error("action is not transitive on level {level}")]
    NotTransitive { level: usize },

    #[error("coset thread incompatible at level {level}")]
    IncompatibleThread { level: usize },

    #[error("{a} and {m} are not coprime")]
    NotCoprime { a: String, m: String },

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("no room below level {level} at horizon {horizon}")]
    NoRoom { level: usize, horizon: usize },

    #[error("invalid cylinder pair: {0}")]
    InvalidCylinders(String),

    #[error("level groups incompatible at level {level}")]
    IncompatibleLevels { level: usize },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}
