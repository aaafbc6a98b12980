//! The algebraic value type, canonicality, and the map to extended reals.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formats::{Domain, Format, Signedness};
use crate::numerics::{Dyadic, XReal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{0} is not in the value set of {1}")]
    NotInValueSet(String, Format),
    #[error("{value} is not a valid value of {format}: {reason}")]
    Invalid {
        value: String,
        format: Format,
        reason: &'static str,
    },
}

/// A value of some format.
///
/// `Finite { m, e }` denotes `m * 2^e`, where `e` is the exponent of the
/// significand's least significant bit. Whether a given value belongs to
/// a given format is checked by [`Value::validate`]; the type itself does
/// not carry its format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum Value {
    #[serde(rename = "nan")]
    NaN,
    /// `sign == true` is negative infinity.
    Inf { sign: bool },
    Finite {
        #[serde(with = "i64_as_string")]
        m: i64,
        e: i64,
    },
}

mod i64_as_string {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &i64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<i64, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

impl Value {
    pub const POS_INF: Value = Value::Inf { sign: false };
    pub const NEG_INF: Value = Value::Inf { sign: true };

    /// Builds a finite value, checking it against `f`.
    pub fn finite(f: &Format, m: i64, e: i64) -> Result<Value, ModelError> {
        let v = Value::Finite { m, e };
        v.validate(f)?;
        Ok(v)
    }

    /// The unique zero of `f`.
    pub fn zero(f: &Format) -> Value {
        Value::Finite { m: 0, e: f.emin_lsb() }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Value::Finite { .. })
    }

    pub fn is_nan(&self) -> bool {
        matches!(self, Value::NaN)
    }

    pub fn validate(&self, f: &Format) -> Result<(), ModelError> {
        let invalid = |reason| ModelError::Invalid {
            value: self.to_string(),
            format: *f,
            reason,
        };
        match *self {
            Value::NaN => Ok(()),
            Value::Inf { sign } => {
                if f.domain() != Domain::Extended {
                    Err(invalid("infinities need an extended format"))
                } else if sign && f.signedness() != Signedness::Signed {
                    Err(invalid("negative infinity needs a signed format"))
                } else {
                    Ok(())
                }
            }
            Value::Finite { m, e } => {
                if f.signedness() == Signedness::Unsigned && m < 0 {
                    Err(invalid("unsigned formats have no negative values"))
                } else if !is_canonical(f, m, e) {
                    Err(invalid("(m, e) is not canonical"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Negation on the algebraic side; NaN is its own negation.
    pub fn negate(&self) -> Value {
        match *self {
            Value::NaN => Value::NaN,
            Value::Inf { sign } => Value::Inf { sign: !sign },
            Value::Finite { m, e } => Value::Finite { m: -m, e },
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::NaN => f.write_str("NaN"),
            Value::Inf { sign: false } => f.write_str("Inf(+)"),
            Value::Inf { sign: true } => f.write_str("Inf(-)"),
            Value::Finite { m, e } => write!(f, "Finite({m}, {e})"),
        }
    }
}

fn magnitude_below_pow2(m: i64, bits: i64) -> bool {
    bits >= 63 || m.unsigned_abs() < (1u64 << bits)
}

/// `|m| < 2^P` and `emin_lsb <= e`.
pub fn is_bounded(f: &Format, m: i64, e: i64) -> bool {
    magnitude_below_pow2(m, f.precision() as i64) && e >= f.emin_lsb()
}

/// Bounded, at the minimum exponent, and below the implicit bit.
pub fn is_subnormal(f: &Format, m: i64, e: i64) -> bool {
    is_bounded(f, m, e)
        && e == f.emin_lsb()
        && magnitude_below_pow2(m, f.precision() as i64 - 1)
}

/// Bounded, with the implicit bit set, and not colliding with a special
/// value encoding in the top binade.
pub fn is_normal(f: &Format, m: i64, e: i64) -> bool {
    let p = f.precision() as i64;
    if !is_bounded(f, m, e) || magnitude_below_pow2(m, p - 1) || e > f.emax_lsb() {
        return false;
    }
    if e < f.emax_lsb() {
        return true;
    }
    let mag = m.unsigned_abs();
    let full = 1u64 << p;
    // Formats whose emax was already lowered (P = 1, and unsigned
    // extended P = 2) have no special value sharing the top binade.
    match (f.signedness(), f.domain()) {
        (Signedness::Signed, Domain::Extended) if p >= 2 => mag < full - 1,
        (Signedness::Unsigned, Domain::Finite) if p >= 2 => mag < full - 1,
        (Signedness::Unsigned, Domain::Extended) if p >= 3 => mag < full - 2,
        _ => true,
    }
}

pub fn is_canonical(f: &Format, m: i64, e: i64) -> bool {
    is_normal(f, m, e) || is_subnormal(f, m, e)
}

/// Evaluation into the closed extended reals.
pub fn eval(v: &Value) -> XReal {
    match *v {
        Value::NaN => XReal::NaN,
        Value::Inf { sign: false } => XReal::PosInf,
        Value::Inf { sign: true } => XReal::NegInf,
        Value::Finite { m, e } => XReal::Finite(Dyadic::new(m, e)),
    }
}

/// Inverse of [`eval`] on the value set of `f`.
///
/// Finite non-zero inputs are normalized to `P` significant bits at their
/// MSB exponent, clamped below at `emin`; the pair is then checked for
/// canonicality.
pub fn encode_value(f: &Format, x: &XReal) -> Result<Value, ModelError> {
    let not_in = || ModelError::NotInValueSet(x.to_decimal_string(), *f);
    let v = match x {
        XReal::NaN => Value::NaN,
        XReal::PosInf => Value::POS_INF,
        XReal::NegInf => Value::NEG_INF,
        XReal::Finite(d) if d.is_zero() => Value::zero(f),
        XReal::Finite(d) => {
            let msb = d.msb_exponent().expect("non-zero");
            let e = msb.max(f.emin()) - f.precision() as i64 + 1;
            let m: BigInt = d.significand_at(e).ok_or_else(not_in)?;
            let m = m.to_i64().ok_or_else(not_in)?;
            Value::Finite { m, e }
        }
    };
    v.validate(f).map_err(|_| not_in())?;
    Ok(v)
}

pub fn in_value_set(f: &Format, x: &XReal) -> bool {
    encode_value(f, x).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fmt(s: &str) -> Format {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_examples() {
        let f = fmt("8p4se");
        assert!(is_canonical(&f, 14, 4));
        assert!(!is_canonical(&f, 15, 4));
        assert!(is_canonical(&f, 3, -10));
        assert!(is_subnormal(&f, 3, -10));
        assert!(!is_canonical(&f, 3, -9));
        assert!(is_canonical(&f, -14, 4));
        assert!(!is_canonical(&f, 8, 5));
        assert!(!is_canonical(&f, 16, 0));
        assert!(is_canonical(&f, 0, -10));
        assert!(!is_canonical(&f, 0, -9));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval(&Value::Finite { m: 14, e: 4 }), XReal::Finite(Dyadic::from(224)));
        assert_eq!(eval(&Value::NEG_INF), XReal::NegInf);
        assert_eq!(eval(&Value::zero(&fmt("8p4se"))), XReal::zero());
    }

    #[test]
    fn value_set_membership() {
        let f = fmt("8p4se");
        assert!(in_value_set(&f, &XReal::Finite(Dyadic::from(224))));
        assert!(!in_value_set(&f, &XReal::Finite(Dyadic::from(225))));
        assert!(!in_value_set(&f, &XReal::Finite(Dyadic::from(240))));
        assert!(!in_value_set(&fmt("8p4sf"), &XReal::PosInf));
        assert!(in_value_set(&fmt("8p4sf"), &XReal::Finite(Dyadic::from(240))));
        assert!(!in_value_set(&fmt("8p4ue"), &XReal::NegInf));
        assert!(!in_value_set(&fmt("8p4ue"), &XReal::Finite(Dyadic::from(-1))));
    }

    #[test]
    fn encode_examples() {
        let f = fmt("8p4se");
        assert_eq!(
            encode_value(&f, &XReal::Finite(Dyadic::from(224))),
            Ok(Value::Finite { m: 14, e: 4 })
        );
        assert_eq!(encode_value(&f, &XReal::zero()), Ok(Value::Finite { m: 0, e: -10 }));
        assert_eq!(encode_value(&f, &XReal::NaN), Ok(Value::NaN));
        // subnormal: 3 * 2^-10 stays at emin_lsb
        assert_eq!(
            encode_value(&f, &XReal::Finite(Dyadic::new(6, -11))),
            Ok(Value::Finite { m: 3, e: -10 })
        );
        assert!(matches!(
            encode_value(&f, &XReal::Finite(Dyadic::new(1, -11))),
            Err(ModelError::NotInValueSet(..))
        ));
    }

    #[test]
    fn validation() {
        let f = fmt("8p4ue");
        assert!(Value::NEG_INF.validate(&f).is_err());
        assert!(Value::POS_INF.validate(&f).is_ok());
        assert!(Value::POS_INF.validate(&fmt("8p4uf")).is_err());
        assert!(Value::finite(&f, -8, 0).is_err());
        assert!(Value::finite(&f, 8, 0).is_ok());
    }

    #[test]
    fn json_shape() {
        let v = Value::Finite { m: -14, e: 4 };
        let j = serde_json::to_string(&v).unwrap();
        assert_eq!(j, r#"{"class":"finite","m":"-14","e":4}"#);
        assert_eq!(serde_json::from_str::<Value>(&j).unwrap(), v);
        assert_eq!(serde_json::to_string(&Value::NaN).unwrap(), r#"{"class":"nan"}"#);
        assert_eq!(
            serde_json::to_string(&Value::NEG_INF).unwrap(),
            r#"{"class":"inf","sign":true}"#
        );
    }
}
