use alloc::string::String;
use core::fmt;

/// Errors raised by the analyses and builders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    IndexOutOfRange { index: usize, size: usize },
    InvalidScalar { num: i64, exp: i64 },
    InvalidSystem(String),
    InvalidParameter(String),
    EmptyAlphabet,
    MismatchedSpaces,
    /// A size or state budget was exceeded.
    CapExceeded { what: &'static str, size: usize, cap: usize },
    NotInvariant,
    NotInvertible,
    ScheduleTooShort { needed: usize, got: usize },
    /// A construction could not proceed from a landing point.
    MissingPairEntry { node: usize },
    /// A hypothesis of a construction does not hold on the inputs.
    Precondition(String),
    /// Two checks that must agree did not.
    Inconsistency(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::IndexOutOfRange { index, size } => {
                write!(f, "point index {index} out of range for system of size {size}")
            }
            Error::InvalidScalar { num, exp } => write!(f, "invalid scalar [{num}, {exp}]"),
            Error::InvalidSystem(msg) => write!(f, "invalid system: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::EmptyAlphabet => write!(f, "alphabet is empty"),
            Error::MismatchedSpaces => write!(f, "points belong to different symbolic spaces"),
            Error::CapExceeded { what, size, cap } => {
                write!(f, "{what}: size {size} exceeds cap {cap}")
            }
            Error::NotInvariant => write!(f, "set is not invariant under the map"),
            Error::NotInvertible => write!(f, "system is not invertible"),
            Error::ScheduleTooShort { needed, got } => {
                write!(f, "schedule has {got} entries, {needed} needed")
            }
            Error::MissingPairEntry { node } => {
                write!(f, "no divergent chain pair available at landing point {node}")
            }
            Error::Precondition(msg) => write!(f, "precondition failed: {msg}"),
            Error::Inconsistency(msg) => write!(f, "internal inconsistency: {msg}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
