//! Exact rational arithmetic for shifting indices, powers of `x` and the
//! series step.
//!
//! Values are stored over `i128` in lowest terms with a positive denominator.
//! Every operation is checked; an overflow is reported as
//! [`RationalError::Overflow`] instead of wrapping.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("integer overflow in rational arithmetic")]
    Overflow,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("empty value list")]
    Empty,
}

/// A reduced fraction `numer / denom` with `denom > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    numer: i128,
    denom: i128,
}

impl Rational {
    pub const ZERO: Rational = Rational { numer: 0, denom: 1 };
    pub const ONE: Rational = Rational { numer: 1, denom: 1 };

    pub fn new(numer: i128, denom: i128) -> Result<Self, RationalError> {
        if denom == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        let g = numer.gcd(&denom);
        let (mut n, mut d) = (numer / g, denom / g);
        if d < 0 {
            n = n.checked_neg().ok_or(RationalError::Overflow)?;
            d = d.checked_neg().ok_or(RationalError::Overflow)?;
        }
        Ok(Rational { numer: n, denom: d })
    }

    pub fn integer(value: i128) -> Self {
        Rational {
            numer: value,
            denom: 1,
        }
    }

    pub fn numer(&self) -> i128 {
        self.numer
    }

    pub fn denom(&self) -> i128 {
        self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.numer == 0
    }

    pub fn is_integer(&self) -> bool {
        self.denom == 1
    }

    pub fn is_negative(&self) -> bool {
        self.numer < 0
    }

    pub fn to_f64(&self) -> f64 {
        self.numer as f64 / self.denom as f64
    }

    pub fn checked_add(&self, rhs: &Rational) -> Result<Rational, RationalError> {
        let l = self.denom.lcm(&rhs.denom);
        let a = self
            .numer
            .checked_mul(l / self.denom)
            .ok_or(RationalError::Overflow)?;
        let b = rhs
            .numer
            .checked_mul(l / rhs.denom)
            .ok_or(RationalError::Overflow)?;
        Rational::new(a.checked_add(b).ok_or(RationalError::Overflow)?, l)
    }

    pub fn checked_neg(&self) -> Result<Rational, RationalError> {
        Ok(Rational {
            numer: self.numer.checked_neg().ok_or(RationalError::Overflow)?,
            denom: self.denom,
        })
    }

    pub fn checked_sub(&self, rhs: &Rational) -> Result<Rational, RationalError> {
        self.checked_add(&rhs.checked_neg()?)
    }

    pub fn checked_mul(&self, rhs: &Rational) -> Result<Rational, RationalError> {
        // cross-reduce first so intermediate products stay small
        let g1 = self.numer.gcd(&rhs.denom).max(1);
        let g2 = rhs.numer.gcd(&self.denom).max(1);
        let n = (self.numer / g1)
            .checked_mul(rhs.numer / g2)
            .ok_or(RationalError::Overflow)?;
        let d = (self.denom / g2)
            .checked_mul(rhs.denom / g1)
            .ok_or(RationalError::Overflow)?;
        Rational::new(n, d)
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational, RationalError> {
        if rhs.is_zero() {
            return Err(RationalError::ZeroDenominator);
        }
        let recip = Rational::new(rhs.denom, rhs.numer)?;
        self.checked_mul(&recip)
    }

    /// Parses an optionally signed finite decimal such as `-12.375`.
    pub fn parse_decimal(text: &str) -> Result<Rational, RationalError> {
        let malformed = || RationalError::Malformed(text.to_string());
        let t = text.trim();
        let (negative, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
        if int_part.is_empty()
            || !all_digits(int_part)
            || !all_digits(frac_part)
            || (body.contains('.') && frac_part.is_empty())
        {
            return Err(malformed());
        }
        let mut numer: i128 = 0;
        let mut denom: i128 = 1;
        for b in int_part.bytes().chain(frac_part.bytes()) {
            numer = numer
                .checked_mul(10)
                .and_then(|n| n.checked_add(i128::from(b - b'0')))
                .ok_or(RationalError::Overflow)?;
        }
        for _ in 0..frac_part.len() {
            denom = denom.checked_mul(10).ok_or(RationalError::Overflow)?;
        }
        if negative {
            numer = -numer;
        }
        Rational::new(numer, denom)
    }

    /// Exact decimal expansion, if the denominator has no prime factors
    /// other than 2 and 5.
    pub fn to_decimal_string(&self) -> Option<String> {
        let mut d = self.denom;
        let (mut twos, mut fives) = (0u32, 0u32);
        while d % 2 == 0 {
            d /= 2;
            twos += 1;
        }
        while d % 5 == 0 {
            d /= 5;
            fives += 1;
        }
        if d != 1 {
            return None;
        }
        let digits = twos.max(fives);
        let scale = 10i128.checked_pow(digits)?;
        let scaled = self.numer.checked_mul(scale / self.denom)?;
        let sign = if scaled < 0 { "-" } else { "" };
        let abs = scaled.unsigned_abs();
        if digits == 0 {
            return Some(format!("{sign}{abs}"));
        }
        let scale = scale as u128;
        Some(format!(
            "{sign}{}.{:0width$}",
            abs / scale,
            abs % scale,
            width = digits as usize
        ))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        // denominators are positive; compare a/b vs c/d via a*d vs c*b,
        // falling back to floats only if the products overflow
        match (
            self.numer.checked_mul(other.denom),
            other.numer.checked_mul(self.denom),
        ) {
            (Some(l), Some(r)) => l.cmp(&r),
            _ => self.to_f64().total_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom == 1 {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, self.denom)
        }
    }
}

/// Accepts either a decimal (`0.8`) or an explicit fraction (`4/5`).
impl FromStr for Rational {
    type Err = RationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('/') {
            Some((n, d)) => {
                let n = Rational::parse_decimal(n)?;
                let d = Rational::parse_decimal(d)?;
                if !n.is_integer() || !d.is_integer() {
                    return Err(RationalError::Malformed(s.to_string()));
                }
                Rational::new(n.numer, d.numer)
            }
            None => Rational::parse_decimal(s),
        }
    }
}

/// Least common multiple of the denominators.
pub fn lcd(values: &[Rational]) -> Result<u64, RationalError> {
    if values.is_empty() {
        return Err(RationalError::Empty);
    }
    let mut acc: i128 = 1;
    for v in values {
        let g = acc.gcd(&v.denom);
        acc = (acc / g)
            .checked_mul(v.denom)
            .ok_or(RationalError::Overflow)?;
    }
    u64::try_from(acc).map_err(|_| RationalError::Overflow)
}

/// Greatest common factor of a non-empty list of positive integers.
pub fn gcf(values: &[u64]) -> Result<u64, RationalError> {
    values
        .iter()
        .copied()
        .reduce(|a, b| a.gcd(&b))
        .ok_or(RationalError::Empty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(Rational::parse_decimal("0.8").unwrap(), r(4, 5));
        assert_eq!(Rational::parse_decimal("3").unwrap(), r(3, 1));
        assert_eq!(Rational::parse_decimal("2.1").unwrap(), r(21, 10));
        assert_eq!(Rational::parse_decimal("-0.25").unwrap(), r(-1, 4));
        assert_eq!(Rational::parse_decimal("+1.50").unwrap(), r(3, 2));
    }

    #[test]
    fn rejects_malformed_decimals() {
        for bad in ["", "-", "1.", ".5", "1e3", "1.2.3", "abc", "1,5", "--1"] {
            assert!(
                matches!(
                    Rational::parse_decimal(bad),
                    Err(RationalError::Malformed(_))
                ),
                "{bad}"
            );
        }
    }

    #[test]
    fn overflow_is_reported() {
        let huge = "1".repeat(60);
        assert_eq!(Rational::parse_decimal(&huge), Err(RationalError::Overflow));
        let big = Rational::integer(i128::MAX / 2);
        assert_eq!(
            big.checked_mul(&Rational::integer(3)),
            Err(RationalError::Overflow)
        );
    }

    #[test]
    fn fraction_syntax() {
        assert_eq!("6/5".parse::<Rational>().unwrap(), r(6, 5));
        assert_eq!("-2/4".parse::<Rational>().unwrap(), r(-1, 2));
        assert!("1.5/2".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
    }

    #[test]
    fn lcd_examples() {
        assert_eq!(lcd(&[r(4, 5), r(1, 2), r(2, 1)]).unwrap(), 10);
        assert_eq!(lcd(&[r(3, 1), r(3, 10), r(3, 5)]).unwrap(), 10);
        assert_eq!(lcd(&[r(1, 1)]).unwrap(), 1);
        assert_eq!(lcd(&[]), Err(RationalError::Empty));
    }

    #[test]
    fn gcf_examples() {
        assert_eq!(gcf(&[30, 3, 6]).unwrap(), 3);
        assert_eq!(gcf(&[20, 8, 5]).unwrap(), 1);
        assert_eq!(gcf(&[7]).unwrap(), 7);
    }

    #[test]
    fn arithmetic() {
        let a = r(1, 3);
        let b = r(1, 6);
        assert_eq!(a.checked_add(&b).unwrap(), r(1, 2));
        assert_eq!(a.checked_sub(&b).unwrap(), r(1, 6));
        assert_eq!(a.checked_mul(&b).unwrap(), r(1, 18));
        assert_eq!(a.checked_div(&b).unwrap(), r(2, 1));
        assert!(a.checked_div(&Rational::ZERO).is_err());
        assert!(r(-1, 2) < r(1, 3));
        assert_eq!(r(3, -6), r(-1, 2));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(r(21, 10).to_decimal_string().unwrap(), "2.1");
        assert_eq!(r(-1, 8).to_decimal_string().unwrap(), "-0.125");
        assert_eq!(r(7, 1).to_decimal_string().unwrap(), "7");
        assert_eq!(r(1, 3).to_decimal_string(), None);
    }

    proptest! {
        #[test]
        fn decimal_round_trip(int in 0u64..1_000_000, frac in proptest::option::of(1u64..1_000_000), neg: bool) {
            let mut text = String::new();
            if neg && (int != 0 || frac.is_some()) {
                text.push('-');
            }
            text.push_str(&int.to_string());
            if let Some(f) = frac {
                let digits = f.to_string();
                let trimmed = digits.trim_end_matches('0');
                text.push('.');
                text.push_str(trimmed);
            }
            let parsed = Rational::parse_decimal(&text).unwrap();
            prop_assert_eq!(parsed.to_decimal_string().unwrap(), text);
        }

        #[test]
        fn singleton_lcd_and_gcf(n in -10_000i128..10_000, d in 1i128..10_000, k in 1u64..1_000_000) {
            let v = r(n, d);
            prop_assert_eq!(lcd(&[v]).unwrap() as i128, v.denom());
            prop_assert_eq!(gcf(&[k]).unwrap(), k);
        }

        #[test]
        fn always_reduced(n in -10_000i128..10_000, d in -10_000i128..10_000) {
            prop_assume!(d != 0);
            let v = r(n, d);
            prop_assert!(v.denom() > 0);
            prop_assert_eq!(v.numer().gcd(&v.denom()), 1);
        }
    }
}
