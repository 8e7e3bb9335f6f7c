//! Closed rational intervals and directed-rounding helpers.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::Rat;

/// A certified enclosure `[lo, hi]` with exact rational endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: Rat) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        to_f64(&((&self.lo + &self.hi) / Rat::from_integer(2.into())))
    }

    /// True when the intervals, each widened by `abs_tol + rel_tol * scale`, overlap.
    /// `scale` is the larger upper endpoint in absolute value.
    pub fn agrees(&self, other: &Interval, abs_tol: &Rat, rel_tol: &Rat) -> bool {
        let scale = self.hi.abs().max(other.hi.abs());
        let slack = abs_tol + rel_tol * scale;
        &self.lo - &slack <= other.hi && &other.lo - &slack <= self.hi
    }

    /// Decimal rendering with outward rounding: `lo` down, `hi` up.
    pub fn to_decimal_pair(&self, digits: usize) -> [String; 2] {
        [decimal(&self.lo, digits, Rounding::Down), decimal(&self.hi, digits, Rounding::Up)]
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [lo, hi] = self.to_decimal_pair(15);
        write!(f, "[{lo}, {hi}]")
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn to_f64(x: &Rat) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // fall back to a scaled conversion for very large numerators and denominators
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift = nb - db;
    let scaled = if shift > 0 {
        x / Rat::from_integer(BigInt::one() << (shift as usize))
    } else {
        x * Rat::from_integer(BigInt::one() << ((-shift) as usize))
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// `floor(x)` for a rational.
pub fn floor(x: &Rat) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// Rational bounds `(lo, hi)` on `sqrt(x)` with `hi - lo <= 2^-bits`; exact when
/// `x * 4^bits` is a perfect square integer.
pub fn sqrt_bounds(x: &Rat, bits: u32) -> (Rat, Rat) {
    assert!(!x.is_negative(), "square root of a negative rational");
    if x.is_zero() {
        return (Rat::zero(), Rat::zero());
    }
    let scale = BigInt::one() << (2 * bits as usize);
    let scaled = x * Rat::from_integer(scale);
    let fl = floor(&scaled);
    let s = fl.sqrt();
    let denom = BigInt::one() << bits as usize;
    let lo = Rat::new(s.clone(), denom.clone());
    if scaled.is_integer() && &s * &s == fl {
        return (lo.clone(), lo);
    }
    (lo, Rat::new(s + 1, denom))
}

pub fn sqrt_lo(x: &Rat, bits: u32) -> Rat {
    sqrt_bounds(x, bits).0
}

pub fn sqrt_hi(x: &Rat, bits: u32) -> Rat {
    sqrt_bounds(x, bits).1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
    Nearest,
}

/// Scientific-notation decimal string with `digits` significant digits, rounded
/// in the requested direction. Zero renders as `"0"`.
pub fn decimal(x: &Rat, digits: usize, mode: Rounding) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let neg = x.is_negative();
    let mag = x.abs();
    // exponent e with 10^e <= mag < 10^(e+1)
    let ten = Rat::from_integer(BigInt::from(10));
    let mut e: i64 = (to_f64(&mag).log10().floor()) as i64;
    let pow10 = |k: i64| -> Rat {
        if k >= 0 {
            Rat::from_integer(num_traits::pow(BigInt::from(10), k as usize))
        } else {
            Rat::new(BigInt::one(), num_traits::pow(BigInt::from(10), (-k) as usize))
        }
    };
    while pow10(e) > mag {
        e -= 1;
    }
    while pow10(e + 1) <= mag {
        e += 1;
    }
    let shifted = &mag * pow10(digits as i64 - 1 - e);
    // direction on the magnitude, flipped for negative values
    let toward_up = match (mode, neg) {
        (Rounding::Up, false) | (Rounding::Down, true) => Some(true),
        (Rounding::Down, false) | (Rounding::Up, true) => Some(false),
        (Rounding::Nearest, _) => None,
    };
    let mut mant = match toward_up {
        Some(true) => {
            let f = floor(&shifted);
            if Rat::from_integer(f.clone()) == shifted {
                f
            } else {
                f + 1
            }
        }
        Some(false) => floor(&shifted),
        None => floor(&(shifted + Rat::new(BigInt::one(), BigInt::from(2)))),
    };
    if mant >= num_traits::pow(BigInt::from(10), digits) {
        mant /= 10;
        e += 1;
    }
    let _ = ten;
    let s = mant.to_string();
    let (head, tail) = s.split_at(1);
    let tail = tail.trim_end_matches('0');
    let sign = if neg && mant.sign() != Sign::NoSign { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e}")
    } else {
        format!("{sign}{head}.{tail}e{e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};

    #[test]
    fn sqrt_bounds_bracket_irrational() {
        let (lo, hi) = sqrt_bounds(&rat(2), 40);
        assert!(&lo * &lo <= rat(2));
        assert!(&hi * &hi >= rat(2));
        assert!(&hi - &lo <= Rat::new(BigInt::one(), BigInt::one() << 40usize));
    }

    #[test]
    fn sqrt_bounds_exact_on_squares() {
        assert_eq!(sqrt_bounds(&rat(9), 10), (rat(3), rat(3)));
        assert_eq!(sqrt_bounds(&ratio(1, 4), 10), (ratio(1, 2), ratio(1, 2)));
    }

    #[test]
    fn decimal_rounding_is_directed() {
        let third = ratio(1, 3);
        assert_eq!(decimal(&third, 3, Rounding::Down), "3.33e-1");
        assert_eq!(decimal(&third, 3, Rounding::Up), "3.34e-1");
        assert_eq!(decimal(&rat(-2), 3, Rounding::Down), "-2e0");
        assert_eq!(decimal(&rat(1000), 2, Rounding::Nearest), "1e3");
        assert_eq!(decimal(&ratio(-1, 3), 2, Rounding::Down), "-3.4e-1");
    }

    #[test]
    fn agreement_with_relative_slack() {
        let a = Interval::new(rat(100), rat(100));
        let b = Interval::new(ratio(100001, 1000), ratio(100001, 1000));
        assert!(!a.agrees(&b, &rat(0), &ratio(1, 1_000_000)));
        assert!(a.agrees(&b, &rat(0), &ratio(1, 10_000)));
    }
}
