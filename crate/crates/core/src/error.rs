use thiserror::Error;

use crate::dsl::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("modulus must be at least 1")]
    InvalidModulus,

    #[error("cell {cell} out of range for modulus {modulus}")]
    CellOutOfRange { cell: usize, modulus: usize },

    #[error("operands use different prime indexings (modulus {left} vs {right})")]
    IndexingMismatch { left: usize, right: usize },

    #[error("pieces do not partition the primes: {0}")]
    NotAPartition(String),

    #[error("left type is not below the right type")]
    NotLeq,

    #[error("types are not strictly comparable")]
    NotStrict,

    #[error("invalid witness descriptor: {0}")]
    InvalidGSpec(String),

    #[error("{value} is not in the localization at {prime}")]
    NotLocal { prime: u64, value: String },

    #[error("prime {0} is not in the descriptor's prime set")]
    PrimeOutsideSet(u64),

    #[error("invalid poset: {0}")]
    InvalidPoset(String),

    #[error("modulus {modulus} is smaller than the {needed} cells required")]
    ModulusTooSmall { needed: usize, modulus: usize },

    #[error("embedding does not match the poset: {0}")]
    EmbeddingMismatch(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
