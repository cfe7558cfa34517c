use core::fmt;

use alloc::string::String;

/// Every failure mode of the core library.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    NotPrime(u64),
    PrimeMismatch { left: u32, right: u32 },
    /// A value cancelled to zero at working precision and was then consumed.
    PrecisionExhausted,
    DivisionByZero,
    /// Membership or location could not be certified with the digits at hand.
    InsufficientPrecision,
    Parse { position: usize, message: String },
    DigitRange { position: usize, digit: u64, prime: u32 },
    NotOnSphere,
    NotInCarrier,
    KindMismatch,
    OverlapDetected,
    NotContained,
    ResourceLimit { requested: u64, cap: u64 },
    DegreeCap { degree: usize, cap: usize },
    NotPermutation { first: usize, second: usize, image: usize },
    InvarianceFailed,
    InvalidArgument(&'static str),
}

impl Error {
    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }

    /// True for the precision and resource family, which callers may retry
    /// with more digits or a larger cap.
    pub fn is_precision_or_resource(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted | Error::InsufficientPrecision | Error::ResourceLimit { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(n) => write!(f, "{n} is not prime"),
            Error::PrimeMismatch { left, right } => {
                write!(f, "operands live over different primes ({left} and {right})")
            }
            Error::PrecisionExhausted => f.write_str("value is indistinguishable from zero at working precision"),
            Error::DivisionByZero => f.write_str("division by zero"),
            Error::InsufficientPrecision => f.write_str("not enough known digits to decide"),
            Error::Parse { position, message } => write!(f, "parse error at {position}: {message}"),
            Error::DigitRange { position, digit, prime } => {
                write!(f, "digit {digit} at {position} is out of range for p = {prime}")
            }
            Error::NotOnSphere => f.write_str("point is not on the sphere"),
            Error::NotInCarrier => f.write_str("operand is not in the group carrier"),
            Error::KindMismatch => f.write_str("source and target groups are of different kinds"),
            Error::OverlapDetected => f.write_str("balls of the clopen set overlap"),
            Error::NotContained => f.write_str("ball is not contained in the parent set"),
            Error::ResourceLimit { requested, cap } => {
                write!(f, "{requested} cells requested, cap is {cap}")
            }
            Error::DegreeCap { degree, cap } => write!(f, "degree {degree} exceeds cap {cap}"),
            Error::NotPermutation { first, second, image } => {
                write!(f, "cells {first} and {second} both map to cell {image}")
            }
            Error::InvarianceFailed => f.write_str("claimed invariant ball is not invariant"),
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
