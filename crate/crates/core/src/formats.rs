//! Format descriptors and their derived constants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::codec;
use crate::numerics::Dyadic;

/// Widest format the crate accepts. Encodings are held in a `u64` and
/// significands in an `i64`.
pub const MAX_WIDTH: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Signedness {
    Signed,
    Unsigned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    Finite,
    Extended,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("bit width K = {0} must be greater than 2")]
    WidthTooSmall(u32),
    #[error("bit width K = {0} exceeds the supported maximum of {MAX_WIDTH}")]
    WidthTooLarge(u32),
    #[error("precision P must be positive")]
    ZeroPrecision,
    #[error("signed formats need P < K (got K = {k}, P = {p})")]
    SignedPrecision { k: u32, p: u32 },
    #[error("unsigned formats need P <= K (got K = {k}, P = {p})")]
    UnsignedPrecision { k: u32, p: u32 },
    #[error("`{0}` is not a format string of the form <K>p<P><s|u><f|e>")]
    Syntax(String),
}

/// A P3109 format: bit width, precision, signedness and domain.
///
/// Only constructible through [`Format::new`], which enforces the
/// parameter constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Format {
    k: u32,
    p: u32,
    signedness: Signedness,
    domain: Domain,
}

impl Format {
    pub fn new(k: u32, p: u32, signedness: Signedness, domain: Domain) -> Result<Format, FormatError> {
        if k <= 2 {
            return Err(FormatError::WidthTooSmall(k));
        }
        if k > MAX_WIDTH {
            return Err(FormatError::WidthTooLarge(k));
        }
        if p == 0 {
            return Err(FormatError::ZeroPrecision);
        }
        match signedness {
            Signedness::Signed if p >= k => return Err(FormatError::SignedPrecision { k, p }),
            Signedness::Unsigned if p > k => return Err(FormatError::UnsignedPrecision { k, p }),
            _ => {}
        }
        Ok(Format { k, p, signedness, domain })
    }

    /// Every legal format of bit width `k`, ordered by signedness,
    /// domain, then precision.
    pub fn all_of_width(k: u32) -> Vec<Format> {
        let mut out = Vec::new();
        for s in [Signedness::Signed, Signedness::Unsigned] {
            for d in [Domain::Extended, Domain::Finite] {
                for p in 1..=k {
                    if let Ok(f) = Format::new(k, p, s, d) {
                        out.push(f);
                    }
                }
            }
        }
        out
    }

    /// Every legal format with `kmin <= K <= kmax`.
    pub fn all(kmin: u32, kmax: u32) -> Vec<Format> {
        (kmin.max(3)..=kmax).flat_map(Format::all_of_width).collect()
    }

    pub fn width(&self) -> u32 {
        self.k
    }

    pub fn precision(&self) -> u32 {
        self.p
    }

    pub fn signedness(&self) -> Signedness {
        self.signedness
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_signed(&self) -> bool {
        self.signedness == Signedness::Signed
    }

    pub fn is_extended(&self) -> bool {
        self.domain == Domain::Extended
    }

    /// Number of encodings, `2^K`.
    pub fn encoding_count(&self) -> u64 {
        1u64 << self.k
    }

    /// Exponent field width.
    pub fn exponent_width(&self) -> u32 {
        match self.signedness {
            Signedness::Signed => self.k - self.p,
            Signedness::Unsigned => self.k - self.p + 1,
        }
    }

    pub fn bias(&self) -> i64 {
        1i64 << (self.exponent_width() - 1)
    }

    pub fn emin(&self) -> i64 {
        1 - self.bias()
    }

    pub fn emin_lsb(&self) -> i64 {
        self.emin() - self.p as i64 + 1
    }

    /// Largest MSB exponent of a finite value.
    pub fn emax(&self) -> i64 {
        let top = (1i64 << self.exponent_width()) - self.bias();
        use Domain::*;
        use Signedness::*;
        match (self.signedness, self.domain, self.p) {
            (Signed, Extended, 1) => top - 2,
            (Unsigned, Finite, 1) => top - 2,
            (Unsigned, Extended, 1) => top - 3,
            (Unsigned, Extended, 2) => top - 2,
            _ => top - 1,
        }
    }

    pub fn emax_lsb(&self) -> i64 {
        self.emax() - self.p as i64 + 1
    }

    /// Largest non-negative encoding that is not a special value.
    pub fn max_finite_encoding(&self) -> u64 {
        let half = 1u64 << (self.k - 1);
        let full = 1u64 << self.k;
        match (self.signedness, self.domain) {
            (Signedness::Signed, Domain::Finite) => half - 1,
            (Signedness::Signed, Domain::Extended) => half - 2,
            (Signedness::Unsigned, Domain::Finite) => full - 2,
            (Signedness::Unsigned, Domain::Extended) => full - 3,
        }
    }

    /// Number of encodings that are NaN or an infinity.
    pub fn reserved_count(&self) -> u64 {
        match (self.signedness, self.domain) {
            (_, Domain::Finite) => 1,
            (Signedness::Signed, Domain::Extended) => 3,
            (Signedness::Unsigned, Domain::Extended) => 2,
        }
    }

    /// Largest finite value.
    pub fn max_finite(&self) -> Dyadic {
        let (m, e) = codec::finite_fields(self, self.bias(), self.max_finite_encoding());
        Dyadic::new(m, e)
    }

    /// Smallest finite value: `-max_finite()` when signed, else zero.
    pub fn min_finite(&self) -> Dyadic {
        match self.signedness {
            Signedness::Signed => -self.max_finite(),
            Signedness::Unsigned => Dyadic::zero(),
        }
    }

    /// Snapshot of every derived constant.
    pub fn derive(&self) -> DerivedConstants {
        DerivedConstants {
            bias: self.bias(),
            exponent_width: self.exponent_width(),
            emin: self.emin(),
            emax: self.emax(),
            emin_lsb: self.emin_lsb(),
            emax_lsb: self.emax_lsb(),
            max_finite_encoding: self.max_finite_encoding(),
            max_finite: self.max_finite(),
            min_finite: self.min_finite(),
        }
    }
}

/// All constants derived from a format's parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedConstants {
    pub bias: i64,
    pub exponent_width: u32,
    pub emin: i64,
    pub emax: i64,
    pub emin_lsb: i64,
    pub emax_lsb: i64,
    pub max_finite_encoding: u64,
    pub max_finite: Dyadic,
    pub min_finite: Dyadic,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.signedness {
            Signedness::Signed => 's',
            Signedness::Unsigned => 'u',
        };
        let d = match self.domain {
            Domain::Finite => 'f',
            Domain::Extended => 'e',
        };
        write!(f, "{}p{}{}{}", self.k, self.p, s, d)
    }
}

impl FromStr for Format {
    type Err = FormatError;

    fn from_str(text: &str) -> Result<Format, FormatError> {
        let syntax = || FormatError::Syntax(text.to_string());
        let lower = text.trim().to_ascii_lowercase();
        let (k, rest) = lower.split_once('p').ok_or_else(syntax)?;
        if rest.len() < 3 {
            return Err(syntax());
        }
        let (p, flags) = rest.split_at(rest.len() - 2);
        let k: u32 = k.parse().map_err(|_| syntax())?;
        let p: u32 = p.parse().map_err(|_| syntax())?;
        let mut flags = flags.chars();
        let s = match flags.next() {
            Some('s') => Signedness::Signed,
            Some('u') => Signedness::Unsigned,
            _ => return Err(syntax()),
        };
        let d = match flags.next() {
            Some('f') => Domain::Finite,
            Some('e') => Domain::Extended,
            _ => return Err(syntax()),
        };
        Format::new(k, p, s, d)
    }
}

#[derive(Serialize, Deserialize)]
struct FormatJson {
    #[serde(rename = "K")]
    k: u32,
    #[serde(rename = "P")]
    p: u32,
    signed: bool,
    extended: bool,
}

impl Serialize for Format {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FormatJson {
            k: self.k,
            p: self.p,
            signed: self.is_signed(),
            extended: self.is_extended(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Format {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let j = FormatJson::deserialize(deserializer)?;
        let s = if j.signed { Signedness::Signed } else { Signedness::Unsigned };
        let d = if j.extended { Domain::Extended } else { Domain::Finite };
        Format::new(j.k, j.p, s, d).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fmt(s: &str) -> Format {
        s.parse().unwrap()
    }

    #[test]
    fn constructor_constraints() {
        use Domain::*;
        use Signedness::*;
        assert!(Format::new(8, 4, Signed, Extended).is_ok());
        assert_eq!(
            Format::new(3, 3, Signed, Extended),
            Err(FormatError::SignedPrecision { k: 3, p: 3 })
        );
        assert!(Format::new(3, 3, Unsigned, Finite).is_ok());
        assert_eq!(Format::new(2, 1, Signed, Finite), Err(FormatError::WidthTooSmall(2)));
        assert_eq!(Format::new(8, 0, Signed, Finite), Err(FormatError::ZeroPrecision));
        assert_eq!(
            Format::new(4, 5, Unsigned, Finite),
            Err(FormatError::UnsignedPrecision { k: 4, p: 5 })
        );
    }

    #[test]
    fn derived_8p4se() {
        let d = fmt("8p4se").derive();
        assert_eq!(d.bias, 8);
        assert_eq!(d.exponent_width, 4);
        assert_eq!(d.emin, -7);
        assert_eq!(d.emax, 7);
        assert_eq!(d.emin_lsb, -10);
        assert_eq!(d.emax_lsb, 4);
        assert_eq!(d.max_finite_encoding, 126);
        assert_eq!(d.max_finite, Dyadic::from(224));
        assert_eq!(d.min_finite, Dyadic::from(-224));
    }

    #[test]
    fn derived_low_precision_unsigned() {
        let d = fmt("3p1ue").derive();
        assert_eq!((d.bias, d.exponent_width, d.emax), (4, 3, 1));
        assert_eq!(d.max_finite_encoding, 5);
        assert_eq!(d.max_finite, Dyadic::from(2));
        assert_eq!(d.min_finite, Dyadic::zero());

        let d = fmt("4p2ue").derive();
        assert_eq!(d.emax, 2);
        assert_eq!(d.max_finite_encoding, 13);
        assert_eq!(d.max_finite, Dyadic::from(6));
    }

    #[test]
    fn derived_signed_finite() {
        let d = fmt("8p4sf").derive();
        assert_eq!(d.max_finite_encoding, 127);
        assert_eq!(d.max_finite, Dyadic::from(240));
    }

    #[test]
    fn format_strings() {
        assert_eq!(fmt("8p4se").to_string(), "8p4se");
        assert_eq!(fmt("16P11UF").to_string(), "16p11uf");
        assert!("8p4".parse::<Format>().is_err());
        assert!("8p4sx".parse::<Format>().is_err());
        assert!("p4se".parse::<Format>().is_err());
        assert!(matches!("3p3se".parse::<Format>(), Err(FormatError::SignedPrecision { .. })));
    }

    #[test]
    fn json_shape() {
        let j = serde_json::to_string(&fmt("8p4se")).unwrap();
        assert_eq!(j, r#"{"K":8,"P":4,"signed":true,"extended":true}"#);
        let back: Format = serde_json::from_str(&j).unwrap();
        assert_eq!(back, fmt("8p4se"));
        assert!(serde_json::from_str::<Format>(r#"{"K":3,"P":3,"signed":true,"extended":true}"#).is_err());
    }

    #[test]
    fn enumeration_counts() {
        // signed: P in 1..K, unsigned: P in 1..=K, two domains each
        for k in 3..=10 {
            assert_eq!(Format::all_of_width(k).len() as u32, 2 * (k - 1) + 2 * k);
        }
    }
}
