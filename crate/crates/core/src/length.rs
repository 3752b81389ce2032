use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, Signed, Zero};
use thiserror::Error;

/// Exact positive edge length.
///
/// Lengths are arbitrary-precision rationals; every comparison in the
/// pipeline is exact.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Length(BigRational);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LengthError {
    #[error("`{0}` is not an exact rational (expected an integer or `p/q`)")]
    Syntax(String),
    #[error("length `{0}` must be positive")]
    NonPositive(String),
}

impl Length {
    pub fn new(value: BigRational) -> Result<Self, LengthError> {
        if value.is_positive() {
            Ok(Length(value))
        } else {
            Err(LengthError::NonPositive(value.to_string()))
        }
    }

    pub fn from_integer(value: i64) -> Result<Self, LengthError> {
        Length::new(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }
}

impl FromStr for Length {
    type Err = LengthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        // `Ratio::from_str` also takes a leading `+`; we only allow digits and one slash.
        let well_formed = match trimmed.split_once('/') {
            Some((p, q)) => is_digits(p) && is_digits(q),
            None => is_digits(trimmed),
        };
        if !well_formed {
            return Err(LengthError::Syntax(s.to_string()));
        }
        let value: BigRational = trimmed
            .parse()
            .map_err(|_| LengthError::Syntax(s.to_string()))?;
        Length::new(value).map_err(|_| LengthError::NonPositive(s.to_string()))
    }
}

/// Parses a signed exact rational such as a coordinate: `p`, `-p` or `-p/q`.
pub fn parse_rational(s: &str) -> Result<BigRational, LengthError> {
    let trimmed = s.trim();
    let magnitude = trimmed.strip_prefix('-').unwrap_or(trimmed);
    let well_formed = match magnitude.split_once('/') {
        Some((p, q)) => is_digits(p) && is_digits(q) && q.bytes().any(|b| b != b'0'),
        None => is_digits(magnitude),
    };
    if !well_formed {
        return Err(LengthError::Syntax(s.to_string()));
    }
    trimmed
        .parse()
        .map_err(|_| LengthError::Syntax(s.to_string()))
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rational(f, &self.0)
    }
}

impl fmt::Debug for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Length({self})")
    }
}

/// Formats `p/q`, or just `p` for integers.
pub fn format_rational(value: &BigRational) -> String {
    struct Show<'a>(&'a BigRational);
    impl fmt::Display for Show<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write_rational(f, self.0)
        }
    }
    Show(value).to_string()
}

fn write_rational(f: &mut fmt::Formatter<'_>, value: &BigRational) -> fmt::Result {
    if value.is_integer() {
        write!(f, "{}", value.numer())
    } else {
        write!(f, "{}/{}", value.numer(), value.denom())
    }
}

impl Add for Length {
    type Output = Length;

    fn add(self, rhs: Length) -> Length {
        Length(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Length> for &'a Length {
    type Output = Length;

    fn add(self, rhs: &'a Length) -> Length {
        Length(&self.0 + &rhs.0)
    }
}

/// Panics if the difference is not positive; callers only subtract a
/// strictly shorter length.
impl Sub for Length {
    type Output = Length;

    fn sub(self, rhs: Length) -> Length {
        let diff = self.0 - rhs.0;
        assert!(
            !diff.is_zero() && diff.is_positive(),
            "length difference must stay positive"
        );
        Length(diff)
    }
}

impl From<u32> for Length {
    /// Panics on zero.
    fn from(value: u32) -> Self {
        Length::from_integer(value as i64).expect("lengths are positive")
    }
}
