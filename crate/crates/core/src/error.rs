use num_bigint::BigUint;
use thiserror::Error;

/// Error type shared by the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid source: {0}")]
    InvalidSource(String),

    #[error("probabilities sum to {sum}, short of 1 by {deficit}")]
    NotNormalized { sum: String, deficit: String },

    #[error("cannot parse {0:?} as an exact rational")]
    RationalParse(String),

    #[error("source file parse error: {0}")]
    SourceParse(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("epsilon must lie in [0, 1], got {0}")]
    EpsOutOfRange(String),

    #[error("type-class budget exceeded: {required} classes needed, budget is {budget}")]
    BudgetExceeded { required: BigUint, budget: u64 },

    #[error("enumeration size cap exceeded: {0}")]
    SizeCapExceeded(String),

    #[error("varentropy is zero (uniform source); {0} is undefined")]
    ZeroVarentropy(&'static str),

    #[error("no atom mass: {0}")]
    ZeroMass(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("unknown check name {0:?}")]
    UnknownCheck(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
