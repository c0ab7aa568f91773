use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("components are not coprime (gcd {gcd})")]
    NotCoprime { gcd: u64 },

    #[error("{a} has no inverse modulo {m}")]
    NoInverse { a: u64, m: u64 },

    #[error("continued fraction too short: final denominator {last} < {target}")]
    ExpansionTooShort { last: u64, target: f64 },

    #[error("partition level {level} out of range (expansion length {len})")]
    LevelOutOfRange { level: usize, len: usize },

    #[error("sieve bound {bound} too small to certify the Frobenius number")]
    SieveBound { bound: u64 },

    #[error("rejection sampler acceptance fell below {threshold:e} ({accepted} of {attempts})")]
    LowAcceptance {
        accepted: u64,
        attempts: u64,
        threshold: f64,
    },

    #[error("empty sample")]
    EmptySample,

    #[error("quadrature did not converge: error estimate {estimate:e} > {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("weight function violates the monotonicity conditions at ({u}, {v}): {what}")]
    WeightConditions { u: u64, v: u64, what: &'static str },

    #[error("overflow in {0}")]
    Overflow(&'static str),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
