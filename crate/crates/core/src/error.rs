use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not a prime modulus")]
    NotPrime(u64),

    #[error("entry {entry} at position {position} is not a residue mod {p}")]
    EntryOutOfRange { entry: u64, position: usize, p: u32 },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("zero vector has no leading entry")]
    ZeroVector,

    #[error("empty factor list")]
    EmptyFactors,

    #[error("{what} of size {size} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("vector {vector} does not have leading entry 1")]
    NotNormalized { vector: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("duplicate vector at positions {first} and {second}")]
    DuplicateVector { first: usize, second: usize },

    #[error("precondition violated by pair ({left}, {right}): {reason}")]
    PairViolation {
        left: String,
        right: String,
        reason: &'static str,
    },

    #[error("inconclusive: {needed} subsets exceed the enumeration budget {budget}")]
    Inconclusive { needed: u128, budget: u128 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("input set is not verified: {0}")]
    Unverified(String),

    #[error("internal invariant broken: {0}")]
    Internal(String),
}
