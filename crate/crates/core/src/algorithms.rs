//! Arithmetic as projection of exact results, and two error-free
//! transformations built on it: FastTwoSum and ExtractScalar.

use serde::Serialize;
use thiserror::Error;

use crate::formats::{Format, Signedness};
use crate::model::{self, Value};
use crate::numerics::{Dyadic, XReal};
use crate::projection::{project, ProjectionSpec, SatMode};
use crate::rounding::{EntropySource, NoEntropy, RoundingMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgorithmError {
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
}

fn precondition(msg: impl Into<String>) -> AlgorithmError {
    AlgorithmError::PreconditionViolation(msg.into())
}

/// `project(eval(a) + eval(b))`.
pub fn fp_add(f: &Format, a: &Value, b: &Value, spec: ProjectionSpec, ent: &mut dyn EntropySource) -> Value {
    project(f, &(&model::eval(a) + &model::eval(b)), spec, ent)
}

/// `project(eval(a) - eval(b))`.
pub fn fp_sub(f: &Format, a: &Value, b: &Value, spec: ProjectionSpec, ent: &mut dyn EntropySource) -> Value {
    project(f, &(&model::eval(a) - &model::eval(b)), spec, ent)
}

/// Canonical MSB exponent of a finite value: `max(floor(log2|x|), emin)`,
/// and `emin` for zero.
pub fn canonical_exponent(f: &Format, x: &Dyadic) -> i64 {
    match x.msb_exponent() {
        Ok(e) => e.max(f.emin()),
        Err(_) => f.emin(),
    }
}

fn finite_real(v: &Value) -> Option<Dyadic> {
    match model::eval(v) {
        XReal::Finite(d) => Some(d),
        _ => None,
    }
}

/// Every intermediate of one FastTwoSum evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FtsTrace {
    pub a: Value,
    pub b: Value,
    pub s: Value,
    pub z: Value,
    pub t: Value,
    /// `a + b`, exact.
    pub exact_sum: XReal,
    /// `a + b - s`, exact.
    pub delta: XReal,
    pub specs: [ProjectionSpec; 3],
}

fn check_fts_inputs(f: &Format, a: &Value, b: &Value) -> Result<(), AlgorithmError> {
    if f.signedness() != Signedness::Signed {
        return Err(precondition(format!("{f} is not a signed format")));
    }
    for v in [a, b] {
        if !v.is_finite() {
            return Err(precondition(format!("{v} is not finite")));
        }
        v.validate(f).map_err(|e| precondition(e.to_string()))?;
    }
    Ok(())
}

/// The second and third steps of FastTwoSum for a given first-step
/// result `s`: `z = project(s - a)`, `t = project(b - z)`.
pub fn fts_tail(
    f: &Format,
    a: &Value,
    b: &Value,
    s: &Value,
    spec2: ProjectionSpec,
    spec3: ProjectionSpec,
    ent: &mut dyn EntropySource,
) -> (Value, Value) {
    let z = fp_sub(f, s, a, spec2, ent);
    let t = fp_sub(f, b, &z, spec3, ent);
    (z, t)
}

/// FastTwoSum on finite values of a signed format:
///
/// ```text
/// s = project1(a + b)
/// z = project2(s - a)
/// t = project3(b - z)
/// ```
pub fn fast_two_sum(
    f: &Format,
    a: &Value,
    b: &Value,
    specs: [ProjectionSpec; 3],
    ent: &mut dyn EntropySource,
) -> Result<FtsTrace, AlgorithmError> {
    check_fts_inputs(f, a, b)?;
    let s = fp_add(f, a, b, specs[0], ent);
    let (z, t) = fts_tail(f, a, b, &s, specs[1], specs[2], ent);
    let exact_sum = &model::eval(a) + &model::eval(b);
    let delta = &exact_sum - &model::eval(&s);
    Ok(FtsTrace {
        a: *a,
        b: *b,
        s,
        z,
        t,
        exact_sum,
        delta,
        specs,
    })
}

/// How far below `sigma` the input sits: the largest `j >= 0` with
/// `|x| <= 2^-j * sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitDepth {
    /// `x = 0`; every `j` qualifies.
    Unbounded,
    Max(i64),
    /// `|x| > sigma`; no `j >= 0` qualifies.
    Exceeds,
}

/// Computes [`SplitDepth`] for `x` against `sigma = 2^sigma_exp`.
pub fn split_depth(sigma_exp: i64, x: &Dyadic) -> SplitDepth {
    if x.is_zero() {
        return SplitDepth::Unbounded;
    }
    let ax = x.abs();
    let msb = ax.msb_exponent().expect("non-zero");
    // 2^msb <= |x| < 2^(msb+1): |x| <= 2^k iff k > msb, or k = msb and |x| is a power of two
    let tight = if ax == Dyadic::pow2(msb) { msb } else { msb + 1 };
    let j = sigma_exp - tight;
    if j < 0 {
        SplitDepth::Exceeds
    } else {
        SplitDepth::Max(j)
    }
}

/// Every intermediate of one ExtractScalar evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EsTrace {
    pub sigma: Value,
    pub x: Value,
    pub s: Value,
    pub x_h: Value,
    pub x_l: Value,
    /// `sigma = 2^i`.
    pub i: i64,
    pub j: SplitDepth,
    pub sats: [SatMode; 3],
}

/// ExtractScalar under round-to-nearest-even:
///
/// ```text
/// s   = project(sigma + x)
/// x_h = project(s - sigma)
/// x_l = project(x - x_h)
/// ```
///
/// `sigma` must be a positive power of two.
pub fn extract_scalar(f: &Format, sigma: &Value, x: &Value, sats: [SatMode; 3]) -> Result<EsTrace, AlgorithmError> {
    if f.signedness() != Signedness::Signed {
        return Err(precondition(format!("{f} is not a signed format")));
    }
    for v in [sigma, x] {
        v.validate(f).map_err(|e| precondition(e.to_string()))?;
    }
    let sigma_real = finite_real(sigma).ok_or_else(|| precondition("sigma is not finite"))?;
    let x_real = finite_real(x).ok_or_else(|| precondition("x is not finite"))?;
    let i = match sigma_real.msb_exponent() {
        Ok(i) if sigma_real.is_positive() && sigma_real == Dyadic::pow2(i) => i,
        _ => return Err(precondition(format!("sigma = {sigma_real} is not a power of two"))),
    };
    let spec = |sat| ProjectionSpec::new(RoundingMode::RNE, sat);
    let s = fp_add(f, sigma, x, spec(sats[0]), &mut NoEntropy);
    let x_h = fp_sub(f, &s, sigma, spec(sats[1]), &mut NoEntropy);
    let x_l = fp_sub(f, x, &x_h, spec(sats[2]), &mut NoEntropy);
    Ok(EsTrace {
        sigma: *sigma,
        x: *x,
        s,
        x_h,
        x_l,
        i,
        j: split_depth(i, &x_real),
        sats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fmt(s: &str) -> Format {
        s.parse().unwrap()
    }

    fn val(f: &Format, text: &str) -> Value {
        model::encode_value(f, &XReal::parse(text).unwrap()).unwrap()
    }

    fn real(v: &Value) -> XReal {
        model::eval(v)
    }

    const RNE_SATFIN: ProjectionSpec = ProjectionSpec::new(RoundingMode::RNE, SatMode::SatFinite);

    #[test]
    fn addition_examples() {
        let f = fmt("8p4se");
        let one = val(&f, "1");
        let small = val(&f, "3*2^-6");
        assert_eq!(real(&fp_add(&f, &one, &small, RNE_SATFIN, &mut NoEntropy)), XReal::parse("1").unwrap());
        let top = val(&f, "224");
        assert_eq!(fp_add(&f, &top, &top, RNE_SATFIN, &mut NoEntropy), top);
        assert_eq!(fp_add(&f, &Value::POS_INF, &Value::NEG_INF, RNE_SATFIN, &mut NoEntropy), Value::NaN);
    }

    #[test]
    fn fts_examples() {
        let f = fmt("8p4se");
        let specs = [RNE_SATFIN; 3];
        let one = val(&f, "1");
        let small = val(&f, "3*2^-6");
        let tr = fast_two_sum(&f, &one, &small, specs, &mut NoEntropy).unwrap();
        assert_eq!(real(&tr.s), XReal::parse("1").unwrap());
        assert_eq!(real(&tr.z), XReal::zero());
        assert_eq!(real(&tr.t), real(&small));
        assert_eq!(real(&tr.t), tr.delta);

        let top = val(&f, "224");
        let tr = fast_two_sum(&f, &top, &top, specs, &mut NoEntropy).unwrap();
        assert_eq!(tr.s, top);
        assert_eq!(real(&tr.z), XReal::zero());
        assert_eq!(tr.t, top);
        assert_eq!(real(&tr.t), tr.delta);

        let zero = Value::zero(&f);
        let a = val(&f, "-3.25");
        let tr = fast_two_sum(&f, &a, &zero, specs, &mut NoEntropy).unwrap();
        assert_eq!((tr.s, tr.z, tr.t), (a, zero, zero));
    }

    #[test]
    fn fts_preconditions() {
        let specs = [RNE_SATFIN; 3];
        let uf = fmt("8p4ue");
        let one = val(&uf, "1");
        assert!(fast_two_sum(&uf, &one, &one, specs, &mut NoEntropy).is_err());
        let f = fmt("8p4se");
        assert!(fast_two_sum(&f, &Value::POS_INF, &val(&f, "1"), specs, &mut NoEntropy).is_err());
    }

    #[test]
    fn extract_scalar_example() {
        let f = fmt("8p4se");
        let sats = [SatMode::SatFinite; 3];
        let tr = extract_scalar(&f, &val(&f, "16"), &val(&f, "3.25"), sats).unwrap();
        assert_eq!(real(&tr.s), XReal::parse("20").unwrap());
        assert_eq!(real(&tr.x_h), XReal::parse("4").unwrap());
        assert_eq!(real(&tr.x_l), XReal::parse("-0.75").unwrap());
        assert_eq!(tr.i, 4);
        assert_eq!(tr.j, SplitDepth::Max(2));
    }

    #[test]
    fn extract_scalar_p1_counterexample() {
        let f = fmt("4p1se");
        let sats = [SatMode::SatFinite; 3];
        let tr = extract_scalar(&f, &val(&f, "2"), &val(&f, "1"), sats).unwrap();
        assert_eq!(real(&tr.s), XReal::parse("4").unwrap());
        assert_eq!(real(&tr.x_h), XReal::parse("2").unwrap());
        assert_eq!(real(&tr.x_l), XReal::parse("-1").unwrap());
        assert_eq!(tr.j, SplitDepth::Max(1));
    }

    #[test]
    fn extract_scalar_zero_and_errors() {
        let f = fmt("8p4se");
        let sats = [SatMode::OvfInf; 3];
        let zero = Value::zero(&f);
        let tr = extract_scalar(&f, &val(&f, "8"), &zero, sats).unwrap();
        assert_eq!(real(&tr.s), XReal::parse("8").unwrap());
        assert_eq!((tr.x_h, tr.x_l), (zero, zero));
        assert_eq!(tr.j, SplitDepth::Unbounded);
        assert!(extract_scalar(&f, &val(&f, "12"), &zero, sats).is_err());
        assert!(extract_scalar(&f, &val(&f, "-8"), &zero, sats).is_err());
    }

    #[test]
    fn split_depths() {
        assert_eq!(split_depth(4, &Dyadic::parse("3.25").unwrap()), SplitDepth::Max(2));
        assert_eq!(split_depth(4, &Dyadic::parse("4").unwrap()), SplitDepth::Max(2));
        assert_eq!(split_depth(4, &Dyadic::parse("4.5").unwrap()), SplitDepth::Max(1));
        assert_eq!(split_depth(4, &Dyadic::parse("-16").unwrap()), SplitDepth::Max(0));
        assert_eq!(split_depth(4, &Dyadic::parse("17").unwrap()), SplitDepth::Exceeds);
    }
}
