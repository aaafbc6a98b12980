//! Per-step rounding choices swept by the algorithm suites, including two
//! round-to-nearest variants with directed tie breaks that the core
//! library does not offer as modes.

use std::fmt;

use p3109::model::{self, Value};
use p3109::projection::saturate;
use p3109::rounding::{round_to_precision, FixedEntropy};
use p3109::{Dyadic, Format, RoundingMode, SatMode, XReal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rounder {
    /// A library mode; `draw` feeds stochastic rounding.
    Mode(RoundingMode, u64),
    /// Nearest, ties toward negative infinity.
    NearestTiesDown,
    /// Nearest, ties toward positive infinity.
    NearestTiesUp,
}

impl Rounder {
    /// Whether this rounder always returns a nearest grid point.
    pub fn is_nearest(&self) -> bool {
        matches!(
            self,
            Rounder::Mode(RoundingMode::RNE, _) | Rounder::NearestTiesDown | Rounder::NearestTiesUp
        )
    }

    pub fn round(&self, f: &Format, x: &Dyadic) -> Dyadic {
        match *self {
            Rounder::Mode(mode, draw) => round_to_precision(f, x, mode, &mut FixedEntropy(draw)),
            Rounder::NearestTiesDown | Rounder::NearestTiesUp => {
                let lo = round_to_precision(f, x, RoundingMode::RD, &mut FixedEntropy(0));
                let hi = round_to_precision(f, x, RoundingMode::RU, &mut FixedEntropy(0));
                let below = x - &lo;
                let above = &hi - x;
                match below.cmp(&above) {
                    std::cmp::Ordering::Less => lo,
                    std::cmp::Ordering::Greater => hi,
                    std::cmp::Ordering::Equal if *self == Rounder::NearestTiesDown => lo,
                    std::cmp::Ordering::Equal => hi,
                }
            }
        }
    }
}

impl fmt::Display for Rounder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rounder::Mode(RoundingMode::SR(k), u) => write!(f, "sr:{k}@{u}"),
            Rounder::Mode(m, _) => write!(f, "{m}"),
            Rounder::NearestTiesDown => f.write_str("rn-ties-down"),
            Rounder::NearestTiesUp => f.write_str("rn-ties-up"),
        }
    }
}

/// One fully determined projection step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub rnd: Rounder,
    pub sat: SatMode,
}

/// Result of one step: the rounded value before saturation (absent for
/// non-finite inputs) and the projected value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepResult {
    pub rounded: Option<Dyadic>,
    pub value: Value,
}

impl Step {
    pub fn apply(&self, f: &Format, x: &XReal) -> StepResult {
        let (rounded, pre) = match x {
            XReal::NaN => {
                return StepResult {
                    rounded: None,
                    value: Value::NaN,
                }
            }
            XReal::Finite(d) => {
                let r = self.rnd.round(f, d);
                (Some(r.clone()), XReal::Finite(r))
            }
            inf => (None, inf.clone()),
        };
        let z = saturate(f, &pre, self.sat);
        StepResult {
            rounded,
            value: model::encode_value(f, &z).expect("saturated value is representable"),
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.rnd, self.sat)
    }
}

/// Every deterministic mode, stochastic rounding with `sr_bits` bits under
/// each of its `2^sr_bits` draws, and optionally the two extra nearest
/// variants; each paired with every saturation mode.
pub fn steps(sr_bits: u32, with_nearest_variants: bool) -> Vec<Step> {
    let mut rounders: Vec<Rounder> = RoundingMode::DETERMINISTIC
        .iter()
        .map(|&m| Rounder::Mode(m, 0))
        .collect();
    rounders.extend((0..1u64 << sr_bits).map(|u| Rounder::Mode(RoundingMode::SR(sr_bits), u)));
    if with_nearest_variants {
        rounders.push(Rounder::NearestTiesDown);
        rounders.push(Rounder::NearestTiesUp);
    }
    let mut out = Vec::new();
    for rnd in rounders {
        for sat in SatMode::ALL {
            out.push(Step { rnd, sat });
        }
    }
    out
}

/// Rounding modes with their draws for the rounding and projection suites:
/// the deterministic modes plus every draw of SR(k) for `k` in
/// `1..=max_sr_bits`.
pub fn mode_sweep(max_sr_bits: u32) -> Vec<(RoundingMode, u64)> {
    let mut out: Vec<(RoundingMode, u64)> = RoundingMode::DETERMINISTIC.iter().map(|&m| (m, 0)).collect();
    for k in 1..=max_sr_bits {
        out.extend((0..1u64 << k).map(|u| (RoundingMode::SR(k), u)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        Dyadic::parse(s).unwrap()
    }

    #[test]
    fn tie_variants() {
        let f: Format = "4p2se".parse().unwrap();
        assert_eq!(Rounder::NearestTiesDown.round(&f, &d("1.25")), d("1"));
        assert_eq!(Rounder::NearestTiesUp.round(&f, &d("1.25")), d("1.5"));
        assert_eq!(Rounder::NearestTiesDown.round(&f, &d("1.3125")), d("1.5"));
        assert_eq!(Rounder::NearestTiesUp.round(&f, &d("-1.25")), d("-1"));
    }

    #[test]
    fn sweep_sizes() {
        assert_eq!(steps(2, false).len(), (5 + 4) * 3);
        assert_eq!(steps(2, true).len(), (5 + 4 + 2) * 3);
        assert_eq!(mode_sweep(6).len(), 5 + 2 + 4 + 8 + 16 + 32 + 64);
    }

    #[test]
    fn step_reports_pre_saturation_value() {
        let f: Format = "8p4se".parse().unwrap();
        let step = Step {
            rnd: Rounder::Mode(RoundingMode::RU, 0),
            sat: SatMode::SatFinite,
        };
        let r = step.apply(&f, &XReal::parse("225").unwrap());
        assert_eq!(r.rounded, Some(d("240")));
        assert_eq!(r.value, Value::Finite { m: 14, e: 4 });
    }
}
