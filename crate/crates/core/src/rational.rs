//! Exact nonnegative rational arithmetic.
//!
//! Quantile ranks, cap ratios, and grid probabilities are all ratios of
//! corpus-scale integers. Keeping them as reduced `u64/u64` fractions with
//! `u128` intermediates makes every comparison exact; floats are produced
//! only at the reporting edge.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Sub};
use core::str::FromStr;

/// A nonnegative rational kept in lowest terms, `den >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: u64,
    den: u64,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// Builds `num/den` reduced to lowest terms.
    ///
    /// Panics if `den == 0`.
    pub fn new(num: u64, den: u64) -> Rational {
        assert!(den != 0, "rational denominator must be nonzero");
        let g = gcd(num, den);
        Rational {
            num: num / g,
            den: den / g,
        }
    }

    pub fn from_integer(n: u64) -> Rational {
        Rational { num: n, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// `1 - self`; panics if `self > 1`.
    pub fn one_minus(&self) -> Rational {
        assert!(*self <= Rational::ONE, "rational exceeds one");
        Rational {
            num: self.den - self.num,
            den: self.den,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Rational) -> Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Rational {
    type Output = Rational;

    fn add(self, rhs: Rational) -> Rational {
        let num = self.num as u128 * rhs.den as u128 + rhs.num as u128 * self.den as u128;
        let den = self.den as u128 * rhs.den as u128;
        reduce128(num, den)
    }
}

impl Sub for Rational {
    type Output = Rational;

    fn sub(self, rhs: Rational) -> Rational {
        assert!(self >= rhs, "rational subtraction would be negative");
        let num = self.num as u128 * rhs.den as u128 - rhs.num as u128 * self.den as u128;
        let den = self.den as u128 * rhs.den as u128;
        reduce128(num, den)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Parse failures for [`Rational::from_str`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError {
    input_kind: &'static str,
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "expected a rational as N, N/D, or a decimal ({})",
            self.input_kind
        )
    }
}

impl core::error::Error for ParseRationalError {}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `"3"`, `"1/2"`, and decimal forms like `"0.505"`.
    fn from_str(s: &str) -> Result<Rational, ParseRationalError> {
        let bad = |k| ParseRationalError { input_kind: k };
        if let Some((n, d)) = s.split_once('/') {
            let num: u64 = n.trim().parse().map_err(|_| bad("bad numerator"))?;
            let den: u64 = d.trim().parse().map_err(|_| bad("bad denominator"))?;
            if den == 0 {
                return Err(bad("zero denominator"));
            }
            return Ok(Rational::new(num, den));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if !frac.bytes().all(|b| b.is_ascii_digit()) || frac.is_empty() {
                return Err(bad("bad decimal"));
            }
            if frac.len() > 18 {
                return Err(bad("too many decimal digits"));
            }
            let int: u64 = if int.is_empty() {
                0
            } else {
                int.parse().map_err(|_| bad("bad integer part"))?
            };
            let frac_val: u64 = frac.parse().map_err(|_| bad("bad decimal"))?;
            let den = 10u64.pow(frac.len() as u32);
            let num = int
                .checked_mul(den)
                .and_then(|v| v.checked_add(frac_val))
                .ok_or(bad("decimal out of range"))?;
            return Ok(Rational::new(num, den));
        }
        let n: u64 = s.trim().parse().map_err(|_| bad("bad integer"))?;
        Ok(Rational::from_integer(n))
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    if a == 0 {
        1
    } else {
        a
    }
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    if a == 0 {
        1
    } else {
        a
    }
}

fn reduce128(num: u128, den: u128) -> Rational {
    let g = gcd128(num, den);
    let num = num / g;
    let den = den / g;
    assert!(
        num <= u64::MAX as u128 && den <= u64::MAX as u128,
        "rational arithmetic overflow"
    );
    Rational {
        num: num as u64,
        den: den as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_lowest_terms() {
        assert_eq!(Rational::new(2, 4), Rational::new(1, 2));
        assert_eq!(Rational::new(0, 7), Rational::ZERO);
        assert_eq!(Rational::new(9, 3), Rational::from_integer(3));
    }

    #[test]
    fn ordering_is_exact_on_large_components() {
        // Adjacent fractions that f64 cannot distinguish.
        let a = Rational::new(u64::MAX - 1, u64::MAX);
        let b = Rational::ONE;
        assert!(a < b);
        assert!(Rational::new(1, 3) < Rational::new(34, 100));
    }

    #[test]
    fn add_sub_roundtrip() {
        let a = Rational::new(1, 6);
        let b = Rational::new(1, 3);
        assert_eq!(a + b, Rational::new(1, 2));
        assert_eq!((a + b) - b, a);
        assert_eq!(Rational::new(3, 10).one_minus(), Rational::new(7, 10));
    }

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!("1/2".parse::<Rational>().unwrap(), Rational::new(1, 2));
        assert_eq!("1".parse::<Rational>().unwrap(), Rational::ONE);
        assert_eq!("0.505".parse::<Rational>().unwrap(), Rational::new(101, 200));
        assert_eq!(".5".parse::<Rational>().unwrap(), Rational::new(1, 2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert!("0.".parse::<Rational>().is_err());
    }

    #[test]
    fn displays_as_fraction() {
        assert_eq!(alloc::format!("{}", Rational::new(9, 10)), "9/10");
        assert_eq!(alloc::format!("{}", Rational::ONE), "1/1");
    }
}
