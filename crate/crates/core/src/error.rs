use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient of q^{exponent} requested but series is only known below q^{prec}")]
    PrecisionExceeded { exponent: i64, prec: i64 },

    #[error("series has no nonzero leading term within its precision")]
    ZeroLeadingTerm,

    #[error("eta quotient term `{term}` has non-integral q-offset {offset}")]
    FractionalValuation { term: String, offset: String },

    #[error("eta combination mixes weights {first} and {second}")]
    MixedWeight { first: String, second: String },

    #[error("cusp denominator {c} does not divide level {level}")]
    InvalidCusp { c: u64, level: u64 },

    #[error("level {0} is not supported (expected one of 6, 10, 12, 18)")]
    UnsupportedLevel(i64),

    #[error("weight {0} is odd")]
    OddWeight(i64),

    #[error("index m = {m} lies below the first basis index {min}")]
    IndexBelowRange { m: i64, min: i64 },

    #[error("insufficient precision for {context}: have {have}{}", needed.map(|n| format!(", need at least {n}")).unwrap_or_default())]
    InsufficientPrecision {
        context: String,
        have: i64,
        needed: Option<i64>,
    },

    #[error("non-integral coefficient {value} at q^{exponent}")]
    IntegralityViolation { exponent: i64, value: String },

    #[error("ladder for level {level}, weight {weight} hit a non-unit pivot {pivot} at q^{exponent}")]
    NonUnitPivot {
        level: u64,
        weight: i64,
        exponent: i64,
        pivot: String,
    },

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("no Atkin-Lehner data for level {level} and prime {p}")]
    UnsupportedPair { level: u64, p: u64 },

    #[error("neither sign makes the Atkin-Lehner identity hold for level {level}, p = {p}")]
    NoConsistentSign { level: u64, p: u64 },

    #[error("fixture error: {0}")]
    Fixture(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable name of the variant, used in reports and exit-code mapping.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::PrecisionExceeded { .. } => "PrecisionExceeded",
            Error::ZeroLeadingTerm => "ZeroLeadingTerm",
            Error::FractionalValuation { .. } => "FractionalValuation",
            Error::MixedWeight { .. } => "MixedWeight",
            Error::InvalidCusp { .. } => "InvalidCusp",
            Error::UnsupportedLevel(_) => "UnsupportedLevel",
            Error::OddWeight(_) => "OddWeight",
            Error::IndexBelowRange { .. } => "IndexBelowRange",
            Error::InsufficientPrecision { .. } => "InsufficientPrecision",
            Error::IntegralityViolation { .. } => "IntegralityViolation",
            Error::NonUnitPivot { .. } => "NonUnitPivot",
            Error::Parse { .. } => "Parse",
            Error::UnsupportedPair { .. } => "UnsupportedPair",
            Error::NoConsistentSign { .. } => "NoConsistentSign",
            Error::Fixture(_) => "Fixture",
            Error::Cache(_) => "Cache",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
