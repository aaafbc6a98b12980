//! Rounding to `P` significant bits with an unbounded exponent.
//!
//! The integer rounder receives the canonical exponent of the binade along
//! with the scaled significand. For `P = 1` every non-zero significand is
//! odd, so parity-based modes (RNE, RO) decide on the parity of the
//! candidate's exponent instead.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::formats::Format;
use crate::numerics::{Dyadic, XReal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoundingError {
    #[error("cannot round {0} to precision; only finite values are rounded")]
    NonFiniteInput(String),
    #[error("unknown rounding mode `{0}` (expected rd, ru, rz, rne, ro or sr:<k>)")]
    UnknownMode(String),
}

/// Most entropy bits a stochastic rounding draw may use.
pub const SR_MAX_BITS: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoundingMode {
    /// Toward negative infinity.
    RD,
    /// Toward positive infinity.
    RU,
    /// Toward zero.
    RZ,
    /// Nearest, ties to even.
    RNE,
    /// Round to odd: exact values are kept, anything else goes to the odd
    /// neighbour.
    RO,
    /// Stochastic rounding with `k` random bits per decision.
    SR(u32),
}

impl RoundingMode {
    pub const DETERMINISTIC: [RoundingMode; 5] = [
        RoundingMode::RD,
        RoundingMode::RU,
        RoundingMode::RZ,
        RoundingMode::RNE,
        RoundingMode::RO,
    ];

    /// True for modes that are monotonic.
    pub fn is_monotonic(&self) -> bool {
        !matches!(self, RoundingMode::SR(_))
    }
}

impl fmt::Display for RoundingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoundingMode::RD => f.write_str("rd"),
            RoundingMode::RU => f.write_str("ru"),
            RoundingMode::RZ => f.write_str("rz"),
            RoundingMode::RNE => f.write_str("rne"),
            RoundingMode::RO => f.write_str("ro"),
            RoundingMode::SR(k) => write!(f, "sr:{k}"),
        }
    }
}

impl FromStr for RoundingMode {
    type Err = RoundingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Ok(match lower.as_str() {
            "rd" => RoundingMode::RD,
            "ru" => RoundingMode::RU,
            "rz" => RoundingMode::RZ,
            "rne" => RoundingMode::RNE,
            "ro" => RoundingMode::RO,
            other => {
                let k = other
                    .strip_prefix("sr:")
                    .and_then(|k| k.parse::<u32>().ok())
                    .filter(|k| (1..=SR_MAX_BITS).contains(k))
                    .ok_or_else(|| RoundingError::UnknownMode(s.to_string()))?;
                RoundingMode::SR(k)
            }
        })
    }
}

impl Serialize for RoundingMode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Supplier of uniformly random bits for stochastic rounding.
pub trait EntropySource {
    /// Returns a value in `0..2^bits`.
    fn draw(&mut self, bits: u32) -> u64;
}

/// ChaCha20 stream; the same seed always yields the same draws.
#[derive(Debug, Clone)]
pub struct SeededEntropy(ChaCha20Rng);

impl SeededEntropy {
    pub fn new(seed: u64) -> Self {
        SeededEntropy(ChaCha20Rng::seed_from_u64(seed))
    }
}

impl EntropySource for SeededEntropy {
    fn draw(&mut self, bits: u32) -> u64 {
        let raw = self.0.next_u64();
        if bits >= 64 {
            raw
        } else {
            raw & ((1u64 << bits) - 1)
        }
    }
}

/// Returns the same draw every time. Used to sweep all draws exhaustively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedEntropy(pub u64);

impl EntropySource for FixedEntropy {
    fn draw(&mut self, bits: u32) -> u64 {
        if bits >= 64 {
            self.0
        } else {
            self.0 & ((1u64 << bits) - 1)
        }
    }
}

/// Entropy for callers that never use stochastic rounding; draws zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoEntropy;

impl EntropySource for NoEntropy {
    fn draw(&mut self, _bits: u32) -> u64 {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Parity {
    Even,
    Odd,
}

/// Parity of the value `c * 2^(exponent - P + 1)` as a `P`-bit number.
///
/// For `P > 1` this is the parity of `c` (a carry to `2^P` is even, as is
/// its renormalized form). For `P = 1` the significand of every non-zero
/// value is one, so the exponent decides. Zero is even.
fn parity(precision: u32, exponent: i64, c: &BigInt) -> Parity {
    if c.is_zero() {
        return Parity::Even;
    }
    if precision > 1 {
        return if c.is_even() { Parity::Even } else { Parity::Odd };
    }
    let value_exponent = exponent + c.bits() as i64 - 1;
    if value_exponent.rem_euclid(2) == 0 {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// Rounds the scaled significand `s` to an integer.
///
/// `exponent` is the canonical (MSB) exponent of the binade `s` was scaled
/// from, so a candidate integer `c` stands for `c * 2^(exponent - P + 1)`.
/// Every mode returns `floor(s)` or `ceil(s)`, and integral `s` is
/// returned unchanged.
pub fn rnd_int(
    mode: RoundingMode,
    precision: u32,
    exponent: i64,
    s: &Dyadic,
    ent: &mut dyn EntropySource,
) -> BigInt {
    let (floor, rem, frac_bits) = s.floor_parts();
    if rem.is_zero() {
        return floor;
    }
    let ceil = &floor + 1;
    let half = BigInt::one() << (frac_bits as usize - 1);
    match mode {
        RoundingMode::RD => floor,
        RoundingMode::RU => ceil,
        RoundingMode::RZ => {
            if floor.is_negative() {
                ceil
            } else {
                floor
            }
        }
        RoundingMode::RNE => match rem.cmp(&half) {
            std::cmp::Ordering::Less => floor,
            std::cmp::Ordering::Greater => ceil,
            std::cmp::Ordering::Equal => {
                let fp = parity(precision, exponent, &floor);
                let cp = parity(precision, exponent, &ceil);
                match (fp, cp) {
                    (Parity::Even, Parity::Odd) => floor,
                    (Parity::Odd, Parity::Even) => ceil,
                    // P = 1 between zero and 2^emin with emin even: both
                    // even, zero wins.
                    _ => {
                        if floor.is_zero() {
                            floor
                        } else {
                            ceil
                        }
                    }
                }
            }
        },
        RoundingMode::RO => {
            let fp = parity(precision, exponent, &floor);
            let cp = parity(precision, exponent, &ceil);
            match (fp, cp) {
                (Parity::Odd, Parity::Even) => floor,
                (Parity::Even, Parity::Odd) => ceil,
                // no odd neighbour: keep away from zero
                _ => {
                    if floor.is_zero() {
                        ceil
                    } else {
                        floor
                    }
                }
            }
        }
        RoundingMode::SR(k) => {
            // threshold = floor(frac * 2^k)
            let threshold = if frac_bits >= k as u64 {
                &rem >> (frac_bits - k as u64) as usize
            } else {
                &rem << (k as u64 - frac_bits) as usize
            };
            let threshold = threshold.to_u64().expect("k <= SR_MAX_BITS");
            if ent.draw(k) < threshold {
                ceil
            } else {
                floor
            }
        }
    }
}

/// Rounds `x` to `P` bits. The exponent is unbounded above; below `emin`
/// the result lands on the subnormal grid with spacing `2^emin_lsb`.
pub fn round_to_precision(
    f: &Format,
    x: &Dyadic,
    mode: RoundingMode,
    ent: &mut dyn EntropySource,
) -> Dyadic {
    if x.is_zero() {
        return Dyadic::zero();
    }
    let p = f.precision() as i64;
    let canonical = x.msb_exponent().expect("non-zero").max(f.emin());
    let scale = canonical - p + 1;
    let scaled = x.scale(-scale);
    let m = rnd_int(mode, f.precision(), canonical, &scaled, ent);
    if m.magnitude().bits() as i64 > p {
        // carried out of the binade: |m| = 2^P
        Dyadic::new(m >> 1usize, scale + 1)
    } else {
        Dyadic::new(m, scale)
    }
}

/// [`round_to_precision`] on an extended real; infinities and NaN are
/// rejected.
pub fn round_xreal(
    f: &Format,
    x: &XReal,
    mode: RoundingMode,
    ent: &mut dyn EntropySource,
) -> Result<Dyadic, RoundingError> {
    match x {
        XReal::Finite(d) => Ok(round_to_precision(f, d, mode, ent)),
        other => Err(RoundingError::NonFiniteInput(other.to_decimal_string())),
    }
}
