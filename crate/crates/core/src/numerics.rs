//! Exact arithmetic on dyadic rationals and the closed extended reals.
//!
//! Every finite value a low-precision format can hold, and every exact sum
//! or difference of two such values, is of the form `m * 2^e`. Nothing in
//! this crate touches host floating point when computing values.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("msb exponent of zero is undefined")]
    ZeroInput,
    #[error("cannot parse `{0}` as an exact dyadic value")]
    Parse(String),
    #[error("`{0}` is a decimal that has no finite binary expansion")]
    NotDyadic(String),
}

/// An exact number `m * 2^e`.
///
/// Storage is not normalized: `3 * 2^1` and `6 * 2^0` are distinct
/// representations of the same number. Equality, ordering and hashing are
/// semantic.
#[derive(Clone)]
pub struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    pub fn new(m: impl Into<BigInt>, e: i64) -> Self {
        Dyadic { m: m.into(), e }
    }

    pub fn zero() -> Self {
        Dyadic { m: BigInt::zero(), e: 0 }
    }

    pub fn from_int(m: impl Into<BigInt>) -> Self {
        Dyadic::new(m, 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic::new(1, e)
    }

    pub fn significand(&self) -> &BigInt {
        &self.m
    }

    pub fn exponent(&self) -> i64 {
        self.e
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.m.is_positive()
    }

    /// Strips trailing zero bits so that `m` is odd, or returns `0 * 2^0`.
    pub fn normalized(&self) -> Dyadic {
        if self.m.is_zero() {
            return Dyadic::zero();
        }
        let tz = self.m.trailing_zeros().unwrap_or(0);
        Dyadic {
            m: &self.m >> tz,
            e: self.e + tz as i64,
        }
    }

    /// Rewrites the value over the exponent `e`, if that is exact.
    pub fn significand_at(&self, e: i64) -> Option<BigInt> {
        if self.m.is_zero() {
            return Some(BigInt::zero());
        }
        if e <= self.e {
            Some(&self.m << (self.e - e) as usize)
        } else {
            let shift = (e - self.e) as u64;
            if self.m.trailing_zeros().unwrap_or(0) >= shift {
                Some(&self.m >> shift as usize)
            } else {
                None
            }
        }
    }

    /// Multiplies by `2^k`.
    pub fn scale(&self, k: i64) -> Dyadic {
        Dyadic { m: self.m.clone(), e: self.e + k }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { m: self.m.abs(), e: self.e }
    }

    /// `floor(log2 |x|)`.
    pub fn msb_exponent(&self) -> Result<i64, NumericsError> {
        if self.m.is_zero() {
            return Err(NumericsError::ZeroInput);
        }
        Ok(self.e + self.m.bits() as i64 - 1)
    }

    /// True when the value is an integer.
    pub fn is_integer(&self) -> bool {
        self.significand_at(0).is_some()
    }

    /// Returns the integer value, if this is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.significand_at(0)
    }

    /// True when the value is an integer multiple of `2^k`.
    pub fn is_multiple_of_pow2(&self, k: i64) -> bool {
        self.significand_at(k).is_some()
    }

    /// Splits into `(floor, remainder, denominator_log2)` with
    /// `x = floor + remainder / 2^denominator_log2` and
    /// `0 <= remainder < 2^denominator_log2`.
    pub fn floor_parts(&self) -> (BigInt, BigInt, u64) {
        if self.e >= 0 {
            return (&self.m << self.e as usize, BigInt::zero(), 0);
        }
        let k = (-self.e) as u64;
        let denom = BigInt::one() << k as usize;
        let (q, r) = self.m.div_mod_floor(&denom);
        (q, r, k)
    }

    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, i64) {
        match self.e.cmp(&other.e) {
            Ordering::Equal => (self.m.clone(), other.m.clone(), self.e),
            Ordering::Greater => (
                &self.m << (self.e - other.e) as usize,
                other.m.clone(),
                other.e,
            ),
            Ordering::Less => (
                self.m.clone(),
                &other.m << (other.e - self.e) as usize,
                self.e,
            ),
        }
    }

    /// Exact decimal rendering, `[-]digits[.digits]`.
    pub fn to_decimal_string(&self) -> String {
        let n = self.normalized();
        if n.e >= 0 {
            return (&n.m << n.e as usize).to_string();
        }
        let k = (-n.e) as usize;
        let neg = n.m.is_negative();
        let digits = (n.m.abs() * BigInt::from(5).pow(k as u32)).to_string();
        let digits = if digits.len() <= k {
            format!("{}{}", "0".repeat(k + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int_part, frac_part) = digits.split_at(digits.len() - k);
        let frac_part = frac_part.trim_end_matches('0');
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(int_part);
        if !frac_part.is_empty() {
            out.push('.');
            out.push_str(frac_part);
        }
        out
    }

    /// Parses `[-]digits[.digits]` or `m*2^e`. Anything that would need a
    /// host float (exponent notation, non-dyadic decimals) is rejected.
    pub fn parse(text: &str) -> Result<Dyadic, NumericsError> {
        let t = text.trim();
        if let Some((m, e)) = t.split_once("*2^") {
            let m: BigInt = m
                .trim()
                .parse()
                .map_err(|_| NumericsError::Parse(text.to_string()))?;
            let e: i64 = e
                .trim()
                .trim_start_matches('(')
                .trim_end_matches(')')
                .parse()
                .map_err(|_| NumericsError::Parse(text.to_string()))?;
            return Ok(Dyadic::new(m, e));
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        let well_formed = !int_part.is_empty()
            && int_part.bytes().all(|b| b.is_ascii_digit())
            && frac_part.bytes().all(|b| b.is_ascii_digit())
            && !(body.contains('.') && frac_part.is_empty());
        if !well_formed {
            return Err(NumericsError::Parse(text.to_string()));
        }
        let k = frac_part.len() as u32;
        let mut n: BigInt = format!("{int_part}{frac_part}")
            .parse()
            .map_err(|_| NumericsError::Parse(text.to_string()))?;
        if neg {
            n = -n;
        }
        // n / 10^k = (n / 5^k) * 2^-k, dyadic iff 5^k divides n
        let five_k = BigInt::from(5).pow(k);
        let (q, r) = n.div_rem(&five_k);
        if !r.is_zero() {
            return Err(NumericsError::NotDyadic(text.to_string()));
        }
        Ok(Dyadic::new(q, -(k as i64)))
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_int(v)
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.m.sign(), other.m.sign());
        if a != b || a == Sign::NoSign {
            return a.cmp(&b);
        }
        let (x, y, _) = self.aligned(other);
        x.cmp(&y)
    }
}

impl std::hash::Hash for Dyadic {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        let n = self.normalized();
        n.m.hash(state);
        n.e.hash(state);
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if rhs.m.is_zero() {
            return self.clone();
        }
        if self.m.is_zero() {
            return rhs.clone();
        }
        let (x, y, e) = self.aligned(rhs);
        Dyadic { m: x + y, e }
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { m: -&self.m, e: self.e }
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { m: -self.m, e: self.e }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.m, self.e)
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal_string())
    }
}

impl FromStr for Dyadic {
    type Err = NumericsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dyadic::parse(s)
    }
}

/// A closed extended real: a dyadic, either infinity, or NaN.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum XReal {
    Finite(Dyadic),
    PosInf,
    NegInf,
    NaN,
}

impl XReal {
    pub fn zero() -> Self {
        XReal::Finite(Dyadic::zero())
    }

    pub fn is_nan(&self) -> bool {
        matches!(self, XReal::NaN)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, XReal::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, XReal::PosInf | XReal::NegInf)
    }

    pub fn as_finite(&self) -> Option<&Dyadic> {
        match self {
            XReal::Finite(d) => Some(d),
            _ => None,
        }
    }

    /// Order on the extended line; `None` when either side is NaN.
    pub fn partial_cmp_ext(&self, other: &XReal) -> Option<Ordering> {
        use XReal::*;
        match (self, other) {
            (NaN, _) | (_, NaN) => None,
            (NegInf, NegInf) | (PosInf, PosInf) => Some(Ordering::Equal),
            (NegInf, _) | (_, PosInf) => Some(Ordering::Less),
            (PosInf, _) | (_, NegInf) => Some(Ordering::Greater),
            (Finite(a), Finite(b)) => Some(a.cmp(b)),
        }
    }

    pub fn parse(text: &str) -> Result<XReal, NumericsError> {
        match text.trim().to_ascii_lowercase().as_str() {
            "nan" => Ok(XReal::NaN),
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(XReal::PosInf),
            "-inf" | "-infinity" => Ok(XReal::NegInf),
            _ => Dyadic::parse(text).map(XReal::Finite),
        }
    }

    pub fn to_decimal_string(&self) -> String {
        match self {
            XReal::Finite(d) => d.to_decimal_string(),
            XReal::PosInf => "+Inf".to_string(),
            XReal::NegInf => "-Inf".to_string(),
            XReal::NaN => "NaN".to_string(),
        }
    }
}

impl Serialize for XReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal_string())
    }
}

impl From<Dyadic> for XReal {
    fn from(d: Dyadic) -> Self {
        XReal::Finite(d)
    }
}

impl Add for &XReal {
    type Output = XReal;
    fn add(self, rhs: &XReal) -> XReal {
        use XReal::*;
        match (self, rhs) {
            (NaN, _) | (_, NaN) => NaN,
            (PosInf, NegInf) | (NegInf, PosInf) => NaN,
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }
}

impl Sub for &XReal {
    type Output = XReal;
    fn sub(self, rhs: &XReal) -> XReal {
        self + &(-rhs)
    }
}

impl Neg for &XReal {
    type Output = XReal;
    fn neg(self) -> XReal {
        match self {
            XReal::Finite(d) => XReal::Finite(-d),
            XReal::PosInf => XReal::NegInf,
            XReal::NegInf => XReal::PosInf,
            XReal::NaN => XReal::NaN,
        }
    }
}

impl Add for XReal {
    type Output = XReal;
    fn add(self, rhs: XReal) -> XReal {
        &self + &rhs
    }
}

impl Sub for XReal {
    type Output = XReal;
    fn sub(self, rhs: XReal) -> XReal {
        &self - &rhs
    }
}

impl Neg for XReal {
    type Output = XReal;
    fn neg(self) -> XReal {
        -&self
    }
}

impl fmt::Display for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl fmt::Debug for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XReal::Finite(d) => write!(f, "Finite({d:?})"),
            other => f.write_str(&other.to_decimal_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(m, e)
    }

    #[test]
    fn add_aligns() {
        let sum = &d(1, 0) + &d(3, -6);
        assert_eq!(sum, d(67, -6));
        assert_eq!(sum.exponent(), -6);
        assert_eq!(&d(5, 3) + &Dyadic::zero(), d(5, 3));
        assert!((&d(14, 4) - &d(14, 4)).is_zero());
    }

    #[test]
    fn equality_is_semantic() {
        assert_eq!(d(3, 1), d(6, 0));
        assert_eq!(d(0, 7), Dyadic::zero());
        assert!(d(-1, 0) < d(0, 100));
        assert!(d(1, -100) > d(-5, 10));
        assert!(d(7, -1) < d(4, 0));
    }

    #[test]
    fn msb() {
        assert_eq!(d(14, 4).msb_exponent(), Ok(7));
        assert_eq!(d(1, 0).msb_exponent(), Ok(0));
        assert_eq!(d(3, -6).msb_exponent(), Ok(-5));
        assert_eq!(d(-3, -6).msb_exponent(), Ok(-5));
        assert_eq!(Dyadic::zero().msb_exponent(), Err(NumericsError::ZeroInput));
    }

    #[test]
    fn xreal_table() {
        use XReal::*;
        let one = Finite(d(1, 0));
        assert_eq!(&PosInf + &NegInf, NaN);
        assert_eq!(&PosInf + &Finite(d(5, 0)), PosInf);
        assert_eq!(&one + &Finite(d(1, -10)), Finite(d(1025, -10)));
        assert_eq!(&NegInf - &NegInf, NaN);
        assert_eq!(&one - &PosInf, NegInf);
        assert_eq!(&NaN + &one, NaN);
    }

    #[test]
    fn floor_parts_negative() {
        let (q, r, k) = d(-5, -1).floor_parts();
        assert_eq!((q, r, k), (BigInt::from(-3), BigInt::from(1), 1));
        let (q, r, k) = d(5, 2).floor_parts();
        assert_eq!((q, r, k), (BigInt::from(20), BigInt::zero(), 0));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(d(67, -6).to_decimal_string(), "1.046875");
        assert_eq!(d(14, 4).to_decimal_string(), "224");
        assert_eq!(d(-3, -2).to_decimal_string(), "-0.75");
        assert_eq!(d(1, -10).to_decimal_string(), "0.0009765625");
        assert_eq!(Dyadic::zero().to_decimal_string(), "0");
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(Dyadic::parse("1.046875"), Ok(d(67, -6)));
        assert_eq!(Dyadic::parse("-0.75"), Ok(d(-3, -2)));
        assert_eq!(Dyadic::parse("448"), Ok(d(448, 0)));
        assert_eq!(Dyadic::parse("67*2^-6"), Ok(d(67, -6)));
        assert!(matches!(Dyadic::parse("0.1"), Err(NumericsError::NotDyadic(_))));
        assert!(Dyadic::parse("1e5").is_err());
        assert!(Dyadic::parse("1.").is_err());
        assert!(Dyadic::parse(".5").is_err());
        assert_eq!(XReal::parse("-inf"), Ok(XReal::NegInf));
    }
}
