use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Coarse classification used by callers to map failures to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Input data violates a documented invariant.
    Validation,
    /// Input is well-formed but the computation cannot proceed.
    Numerical,
    /// A configuration value is out of range.
    Config,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A value is outside its allowed domain.
    OutOfRange {
        what: &'static str,
        value: f64,
    },
    DuplicateTicker(String),
    /// A series has a hole or is not strictly increasing.
    NonContiguous {
        what: String,
        year: i32,
    },
    /// Not enough observations for the requested statistic.
    InsufficientData {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    /// Two inputs disagree in length or shape.
    DimensionMismatch {
        expected: usize,
        got: usize,
    },
    /// Required years are missing from a series.
    MissingYears {
        what: String,
        years: alloc::vec::Vec<i32>,
    },
    /// No asset covers the requested span.
    NoCoverage {
        start: i32,
        end: i32,
    },
    /// A quota asks for more assets than remain after screening.
    QuotaShortfall {
        class: &'static str,
        wanted: usize,
        available: usize,
    },
    NotPositiveSemidefinite(f64),
    /// Portfolio volatility is zero, the green Sharpe ratio is undefined.
    ZeroVolatility,
    RankDeficient {
        column: usize,
    },
    ZeroVarianceResponse,
    /// Hull input is degenerate (fewer than four points or coplanar).
    DegenerateHull(&'static str),
    Config(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NotPositiveSemidefinite(_)
            | Error::ZeroVolatility
            | Error::RankDeficient { .. }
            | Error::ZeroVarianceResponse
            | Error::DegenerateHull(_) => ErrorKind::Numerical,
            Error::Config(_) => ErrorKind::Config,
            _ => ErrorKind::Validation,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OutOfRange { what, value } => write!(f, "{what} out of range: {value}"),
            Error::DuplicateTicker(t) => write!(f, "duplicate ticker {t:?}"),
            Error::NonContiguous { what, year } => {
                write!(f, "{what}: years are not contiguous at {year}")
            }
            Error::InsufficientData { what, needed, got } => {
                write!(f, "{what}: need at least {needed} observations, got {got}")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::MissingYears { what, years } => write!(f, "{what}: missing years {years:?}"),
            Error::NoCoverage { start, end } => write!(f, "no asset covers span {start}-{end}"),
            Error::QuotaShortfall { class, wanted, available } => write!(
                f,
                "quota for {class}-cap asks for {wanted} assets but only {available} available \
                 (short by {})",
                wanted - available
            ),
            Error::NotPositiveSemidefinite(q) => {
                write!(f, "covariance is not positive semi-definite (w'Cw = {q})")
            }
            Error::ZeroVolatility => f.write_str("portfolio volatility is zero"),
            Error::RankDeficient { column } => {
                write!(f, "design matrix is rank deficient at column {column}")
            }
            Error::ZeroVarianceResponse => f.write_str("response has zero variance"),
            Error::DegenerateHull(why) => write!(f, "degenerate hull input: {why}"),
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
