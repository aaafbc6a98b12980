//! Projection of extended reals into a format: round, saturate, encode.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::formats::{Domain, Format, Signedness};
use crate::model::{self, Value};
use crate::numerics::XReal;
use crate::rounding::{self, EntropySource, RoundingError, RoundingMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectionError {
    #[error("unknown saturation mode `{0}` (expected satfin, ovfinf or satprop)")]
    UnknownSatMode(String),
    #[error(transparent)]
    Rounding(#[from] RoundingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SatMode {
    /// Overflow clamps to the largest finite magnitude, infinities too.
    SatFinite,
    /// Overflow goes to infinity where the format has one.
    OvfInf,
    /// Infinite inputs stay infinite; finite overflow clamps.
    SatPropagate,
}

impl SatMode {
    pub const ALL: [SatMode; 3] = [SatMode::SatFinite, SatMode::OvfInf, SatMode::SatPropagate];
}

impl fmt::Display for SatMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SatMode::SatFinite => "satfin",
            SatMode::OvfInf => "ovfinf",
            SatMode::SatPropagate => "satprop",
        })
    }
}

impl FromStr for SatMode {
    type Err = ProjectionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "satfin" | "satfinite" => Ok(SatMode::SatFinite),
            "ovfinf" => Ok(SatMode::OvfInf),
            "satprop" | "satpropagate" => Ok(SatMode::SatPropagate),
            _ => Err(ProjectionError::UnknownSatMode(s.to_string())),
        }
    }
}

impl Serialize for SatMode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A rounding mode paired with a saturation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ProjectionSpec {
    pub rnd: RoundingMode,
    pub sat: SatMode,
}

impl ProjectionSpec {
    pub const fn new(rnd: RoundingMode, sat: SatMode) -> Self {
        ProjectionSpec { rnd, sat }
    }
}

impl fmt::Display for ProjectionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.rnd, self.sat)
    }
}

/// Maps a rounded value (or a propagated infinity) into the finite range
/// of `f`, or to an infinity, according to `sat`.
///
/// Formats without infinities clamp finite overflow under every mode. An
/// infinite input that the format cannot hold becomes NaN unless the mode
/// is `SatFinite`. Negative values offered to an unsigned format clamp to
/// zero, except under `OvfInf` where they become NaN.
pub fn saturate(f: &Format, y: &XReal, sat: SatMode) -> XReal {
    let extended = f.domain() == Domain::Extended;
    let signed = f.signedness() == Signedness::Signed;
    let hi = f.max_finite();
    let lo = f.min_finite();
    match y {
        XReal::NaN => XReal::NaN,
        XReal::Finite(d) if *d > hi => match sat {
            SatMode::OvfInf if extended => XReal::PosInf,
            _ => XReal::Finite(hi),
        },
        XReal::Finite(d) if *d < lo => {
            if signed {
                match sat {
                    SatMode::OvfInf if extended => XReal::NegInf,
                    _ => XReal::Finite(lo),
                }
            } else {
                match sat {
                    SatMode::OvfInf => XReal::NaN,
                    _ => XReal::Finite(lo),
                }
            }
        }
        XReal::Finite(d) => XReal::Finite(d.clone()),
        XReal::PosInf => match sat {
            SatMode::SatFinite => XReal::Finite(hi),
            _ if extended => XReal::PosInf,
            _ => XReal::NaN,
        },
        XReal::NegInf => match sat {
            SatMode::SatFinite => XReal::Finite(lo),
            _ if extended && signed => XReal::NegInf,
            _ => XReal::NaN,
        },
    }
}

/// Rounds, saturates and encodes `x`. The result is always a valid value
/// of `f`.
pub fn project(f: &Format, x: &XReal, spec: ProjectionSpec, ent: &mut dyn EntropySource) -> Value {
    let z = project_real(f, x, spec, ent);
    model::encode_value(f, &z).expect("projection lands in the value set")
}

/// [`project`] without the final encode: the projected extended real.
pub fn project_real(f: &Format, x: &XReal, spec: ProjectionSpec, ent: &mut dyn EntropySource) -> XReal {
    let rounded = match x {
        XReal::NaN => return XReal::NaN,
        XReal::Finite(d) => XReal::Finite(rounding::round_to_precision(f, d, spec.rnd, ent)),
        inf => inf.clone(),
    };
    saturate(f, &rounded, spec.sat)
}
