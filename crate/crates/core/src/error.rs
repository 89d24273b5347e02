use thiserror::Error;

/// Errors produced by the field, subspace and construction layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("modulus rejected: {0}")]
    BadModulus(String),

    #[error("no such element: constraint `{constraint}` cannot be satisfied")]
    NoSuchElement { constraint: String },

    #[error("requested {requested} monic irreducibles of degree <= {max_degree}, only {available} exist")]
    InsufficientSupply {
        requested: usize,
        max_degree: usize,
        available: u128,
    },

    #[error("enumeration budget exceeded: {required} items required, cap is {cap}")]
    BudgetExceeded { required: u128, cap: u128 },

    #[error("elements belong to different field contexts")]
    MixedContexts,

    #[error("not a B_{r}-set: {left:?} and {right:?} have equal sums")]
    NotBrSet { r: usize, left: Vec<u64>, right: Vec<u64> },

    #[error("subspace is not {0}-Sidon")]
    NotRSidon(usize),

    #[error("group order {0} cannot be factored with the available methods")]
    Unfactorable(String),

    #[error("measured value disagrees with claim: {0}")]
    ClaimMismatch(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
