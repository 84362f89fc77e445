use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("conditioning event has probability {0:e}")]
    ConditioningOnNullEvent(f64),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("invalid category counts: below={below}, exact={exact}, n={n}")]
    InvalidCounts { below: usize, exact: usize, n: usize },

    #[error("invalid arguments: {0}")]
    InvalidArgs(String),

    #[error("component {0} has no finite tail bound")]
    UnboundedTail(usize),

    #[error("systems differ in shape: ({0}, {1}) vs ({2}, {3})")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("joint support of {0} outcomes exceeds the enumeration limit {1}")]
    TooLarge(u128, u128),

    #[error("conditioning event accepted {accepted} of {drawn} draws")]
    ConditioningTooRare { accepted: u64, drawn: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
