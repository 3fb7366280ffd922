use alloc::string::String;
use core::fmt;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A series must hold at least one observation.
    EmptySeries,
    /// An input value was NaN or infinite where a finite number is required.
    NonFinite(&'static str),
    /// A parameter is outside its mathematical domain.
    Domain(String),
    /// A configuration is internally inconsistent (bad bandwidth, missing
    /// tail model, probabilities not summing to one, ...).
    Config(String),
    /// The requested quantity is undefined in the declared asymptotic
    /// regime; the message names the regime to use instead.
    Regime(String),
    /// Paired series must have equal lengths.
    LengthMismatch { left: usize, right: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptySeries => write!(f, "series is empty"),
            Error::NonFinite(what) => write!(f, "{what} must be finite"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Regime(msg) => write!(f, "regime error: {msg}"),
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
