use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),
    #[error("level must be positive, got n = 0")]
    ZeroLevel,
    #[error("divisor has non-unit leading coefficient {0}")]
    NonUnitLeading(String),
    #[error("resultant of a zero polynomial is undefined")]
    ZeroPolynomial,
    #[error("constant term {0} is not a unit mod p")]
    NonUnitConstant(String),
    #[error("{p} divides the multiplier {u}")]
    NonUnitMultiplier { p: u64, u: String },
    #[error("polynomial vanishes at zeta_{{p^{n}}} - 1")]
    Vanishes { n: u32 },
    #[error("polynomial is not coprime to omega_{n}")]
    NotCoprime { n: u32 },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("series parameters differ: {0}")]
    ParamMismatch(String),
    #[error("exact division failed: {0}")]
    DivisibilityFailed(String),
    #[error("both mu invariants are infinite")]
    BothMuInfinite,
    #[error("the selected branch {0} has infinite mu")]
    InfiniteBranch(&'static str),
    #[error("closed form only covers v in {{1, inf}}, got v = {0}")]
    UnsupportedValuation(String),
    #[error("characteristic rank is not an integer: {0}")]
    NonIntegral(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
