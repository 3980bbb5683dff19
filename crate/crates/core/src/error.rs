use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field of size {p}^{k} exceeds the cap of {cap} elements")]
    FieldCap { p: u32, k: u32, cap: u64 },
    #[error("zero has no inverse or discrete logarithm")]
    Zero,
    #[error("character order {order} does not divide {exponent}·(field size − 1)")]
    CharacterOrder { order: u32, exponent: u32 },
    #[error("mismatched cyclotomic orders {0} and {1}")]
    MismatchedOrder(u32, u32),
    #[error("value expected to be a rational integer is not: {0}")]
    NonIntegral(String),
    #[error("Weil size check failed: {0}")]
    WeilSize(String),
    #[error("characteristic {p} divides {what}")]
    Characteristic { p: u32, what: String },
    #[error("regime violation: {0}")]
    Regime(String),
    #[error("identity check failed: {0}")]
    Identity(String),
    #[error("dual-path mismatch: {0}")]
    Mismatch(String),
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("cache I/O: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
