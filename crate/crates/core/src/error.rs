use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("group is not uniquely 2-divisible")]
    NotDivisible,
    #[error("group is bounded")]
    Bounded,
    #[error("the doubled subgroup 2X is bounded")]
    DoublingBounded,
    #[error("the point must be nonzero")]
    ZeroExcluded,
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),
    #[error("codomain mismatch: {0}")]
    CodomainMismatch(String),
    #[error("window enumerates no elements")]
    EmptyWindow,
    #[error("shell grid is empty")]
    EmptyGrid,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("witness out of range: {0}")]
    WitnessTooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
