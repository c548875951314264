use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// A scenario or configuration invariant violation, addressed by
/// `section.key` path.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationError {
    pub path: String,
    pub message: String,
}

impl ValidationError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// An argument outside the domain of a model function.
    Domain {
        what: &'static str,
        value: f64,
    },
    /// An implicit PV solve hit its iteration cap.
    NoConvergence {
        what: &'static str,
        voltage: f64,
        irradiance: f64,
    },
    /// The diode residual has no sign change on the search interval.
    FitFailure {
        lo: f64,
        hi: f64,
    },
    EmptySeries,
    Invalid(Vec<ValidationError>),
    /// A step failed; `time` is the end-of-step simulation time.
    Step {
        time: f64,
        source: Box<Error>,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::NoConvergence {
                what,
                voltage,
                irradiance,
            } => write!(
                f,
                "{what} did not converge (v = {voltage} V, G = {irradiance} W/m^2)"
            ),
            Error::FitFailure { lo, hi } => write!(
                f,
                "PV fit failed: diode residual has no sign change for a in [{lo}, {hi}] V"
            ),
            Error::EmptySeries => f.write_str("time series is empty"),
            Error::Invalid(errors) => {
                f.write_str("invalid scenario:")?;
                for e in errors {
                    write!(f, "\n  {e}")?;
                }
                Ok(())
            }
            Error::Step { time, source } => write!(f, "at t = {time} s: {source}"),
        }
    }
}

impl core::error::Error for Error {}
