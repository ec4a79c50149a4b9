//! Shared error type.
//!
//! Errors fall into three informal classes, which the CLI maps to distinct
//! exit codes: malformed input (parsing, zero polynomials, singular
//! matrices), guard violations (size caps and factorization bounds that keep
//! the tool at desk scale), and internal inconsistencies (two independent
//! routes to the same quantity disagreeing beyond tolerance).

use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Syntax error in the polynomial grammar or a structured input file.
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    /// The requested quantity is undefined for the zero polynomial.
    #[error("undefined for the zero polynomial")]
    ZeroPolynomial,

    /// A valuation of zero was requested.
    #[error("the p-adic valuation of zero is undefined")]
    ZeroValuation,

    /// A number that must be prime is not.
    #[error("{0} is not prime")]
    NotPrime(u64),

    /// The polynomial is zero modulo p, so translate ranks are undefined.
    #[error("polynomial vanishes modulo {0}")]
    ZeroModP(u64),

    /// An operation requires integer coefficients.
    #[error("polynomial has non-integer coefficients")]
    NonIntegerCoefficients,

    /// Coefficient gcd/lcm left the 64-bit range we factor over.
    #[error("coefficient {what} {value} exceeds the 64-bit factorization bound")]
    CoefficientBound { what: &'static str, value: String },

    /// A cofactor survived trial division and is not prime.
    #[error("cannot factor {0}: composite cofactor above the trial-division bound")]
    FactorizationFailure(u64),

    /// Window volume above the supported cap.
    #[error("window volume {volume} exceeds the cap {cap}")]
    WindowTooLarge { volume: u128, cap: usize },

    /// A restriction-matrix entry does not fit in a machine word.
    #[error("restriction entry does not fit in 64 bits")]
    EntryOverflow,

    /// The brute-force sumset enumeration would exceed its guard.
    #[error("enumeration of {size} assignments exceeds the 2^{limit_log2} guard")]
    EnumerationGuard { size: String, limit_log2: u32 },

    /// A matrix that must be invertible is singular.
    #[error("matrix is singular")]
    SingularMatrix,

    /// Every grid point fell below the evaluation cutoff.
    #[error("all grid points were excluded (|f| < epsilon everywhere on the grid)")]
    AllPointsExcluded,

    /// Dimensions outside 1..=4 are not supported.
    #[error("dimension {0} is outside the supported range 1..=4")]
    UnsupportedDimension(usize),

    /// A module presentation has rows of inconsistent shape.
    #[error("invalid module presentation: {0}")]
    BadPresentation(String),

    /// Two independent computations of the same quantity disagree.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

impl Error {
    /// Shorthand for parse errors.
    pub fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }
}
