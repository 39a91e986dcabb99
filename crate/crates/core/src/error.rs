use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot invert zero series")]
    InvertZero,

    #[error("coefficient not determined at this precision (exponent {exponent}, series known mod q^{prec})")]
    NotDetermined { exponent: i64, prec: i64 },

    #[error("valuation of empty series")]
    EmptyValuation,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported Eisenstein weight {0}")]
    UnsupportedWeight(i64),

    #[error("fractional leading exponent {numerator}/24 in {quotient}")]
    FractionalLeadingExponent { quotient: String, numerator: i64 },

    #[error("level {0} not genus zero")]
    NotGenusZero(u32),

    #[error("weight {0} is odd")]
    OddWeight(i64),

    #[error("{to} does not divide {from}")]
    NotDivisor { from: u32, to: u32 },

    #[error("empty generator pool for level {level} weight {weight}: tried {attempted}")]
    EmptyPool {
        level: u32,
        weight: i64,
        attempted: String,
    },

    #[error("spanning family deficient for level {level} weight {weight}: achieved v'={achieved}, need v={required}")]
    FamilyDeficient {
        level: u32,
        weight: i64,
        achieved: i64,
        required: i64,
    },

    #[error("synthesized seed for level {level} weight {weight} contradicts reference prefix at q^{exponent}")]
    SeedMismatch {
        level: u32,
        weight: i64,
        exponent: i64,
    },

    #[error("family member outside M_{weight}(Gamma0({level})): combination with valuation {valuation} > {bound}")]
    FamilyInconsistent {
        level: u32,
        weight: i64,
        valuation: i64,
        bound: i64,
    },

    #[error("insufficient precision: need prec >= {required}, have {available}")]
    InsufficientPrecision { required: i64, available: i64 },

    #[error("requested range exceeds built basis: {0}")]
    OutOfRange(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
