//! FastTwoSum over every operand pair, sweeping each step's rounding and
//! saturation independently.
//!
//! Rounding does not depend on the saturation mode and a rounded value
//! has at most two candidates, so each step rounds once per rounder and
//! saturates once per distinct rounded value. The checks then run over
//! the distinct `(s, z, t)` values and map back to the first spec
//! combination producing each.

use p3109::algorithms::canonical_exponent;
use p3109::model::{self, Value};
use p3109::projection::saturate;
use p3109::{Dyadic, Format, RoundingMode, SatMode, XReal};
use serde_json::{json, Value as Json};

use super::{js, Ctx};
use crate::lattice::ValueLattice;
use crate::report::{Report, Tally};
use crate::rn::Rounder;

/// Results of one step under every `(rounder, sat)` combination, indexed
/// `rounder * 3 + sat`.
struct StepRow {
    /// Rounded value before saturation, per rounder.
    rounded: Vec<Option<Dyadic>>,
    values: Vec<Value>,
}

impl StepRow {
    fn distinct(&self) -> Vec<(usize, Value)> {
        let mut out: Vec<(usize, Value)> = Vec::new();
        for (i, v) in self.values.iter().enumerate() {
            if !out.iter().any(|(_, w)| w == v) {
                out.push((i, *v));
            }
        }
        out
    }
}

struct Stepper {
    rounders: Vec<Rounder>,
}

impl Stepper {
    fn new(sr_bits: u32, with_nearest_variants: bool) -> Stepper {
        let mut rounders: Vec<Rounder> = RoundingMode::DETERMINISTIC.iter().map(|&m| Rounder::Mode(m, 0)).collect();
        rounders.extend((0..1u64 << sr_bits).map(|u| Rounder::Mode(RoundingMode::SR(sr_bits), u)));
        if with_nearest_variants {
            rounders.push(Rounder::NearestTiesDown);
            rounders.push(Rounder::NearestTiesUp);
        }
        Stepper { rounders }
    }

    fn len(&self) -> usize {
        self.rounders.len() * SatMode::ALL.len()
    }

    fn label(&self, i: usize) -> String {
        format!("({}, {})", self.rounders[i / 3], SatMode::ALL[i % 3])
    }

    fn rounder(&self, i: usize) -> Rounder {
        self.rounders[i / 3]
    }

    fn apply(&self, f: &Format, x: &XReal) -> StepRow {
        let project = |pre: &XReal| -> [Value; 3] {
            SatMode::ALL.map(|sat| model::encode_value(f, &saturate(f, pre, sat)).expect("saturated value is representable"))
        };
        let mut values = Vec::with_capacity(self.len());
        let mut rounded = Vec::with_capacity(self.rounders.len());
        match x {
            XReal::Finite(d) => {
                let mut memo: Vec<(Dyadic, [Value; 3])> = Vec::new();
                for rnd in &self.rounders {
                    let r = rnd.round(f, d);
                    let row = match memo.iter().find(|(k, _)| *k == r) {
                        Some((_, row)) => *row,
                        None => {
                            let row = project(&XReal::Finite(r.clone()));
                            memo.push((r.clone(), row));
                            row
                        }
                    };
                    values.extend(row);
                    rounded.push(Some(r));
                }
            }
            other => {
                let row = project(other);
                for _ in &self.rounders {
                    values.extend(row);
                    rounded.push(None);
                }
            }
        }
        StepRow { rounded, values }
    }
}

/// Where a violation came from: step-2 and step-3 spec indices with
/// their outputs.
type Tail = (usize, Value, usize, Value);

/// Everything about one distinct first-step result `s`.
struct AfterS {
    s: Value,
    sd: Option<Dyadic>,
    z_row: StepRow,
    /// For each distinct z: its first index and the t row.
    tails: Vec<(usize, Value, StepRow)>,
}

impl AfterS {
    /// First `(z, t)` combination whose `t` fails `pred`.
    fn find(&self, pred: impl Fn(&Value) -> bool) -> Option<Tail> {
        for (i2, z, t_row) in &self.tails {
            for (i3, t) in t_row.distinct() {
                if !pred(&t) {
                    return Some((*i2, *z, i3, t));
                }
            }
        }
        None
    }
}

struct Tallies {
    exact_z: Tally,
    delta: Tally,
    eft: Tally,
    faith: Tally,
    immune: Tally,
    overflow_exact: Tally,
}

struct Sweep<'a> {
    f: &'a Format,
    lattice: &'a ValueLattice,
    hi: Dyadic,
    first: Stepper,
    rest: Stepper,
}

impl Sweep<'_> {
    fn overflows(&self, rounded: &Option<Dyadic>) -> bool {
        match rounded {
            Some(d) => d.abs() > self.hi,
            None => true,
        }
    }

    fn to_value(&self, x: &XReal) -> Option<Value> {
        if self.lattice.contains(x) {
            model::encode_value(self.f, x).ok()
        } else {
            None
        }
    }

    fn trace(&self, sum: &Dyadic, i1: usize, s: &Value, tail: Option<Tail>) -> Json {
        let mut tr = json!({
            "exact_sum": js(sum),
            "spec1": self.first.label(i1),
            "s": js(s),
        });
        if let Some((i2, z, i3, t)) = tail {
            tr["spec2"] = json!(self.rest.label(i2));
            tr["z"] = js(&z);
            tr["spec3"] = json!(self.rest.label(i3));
            tr["t"] = js(&t);
        }
        tr
    }

    fn after_s(&self, s: Value, ra: &Dyadic, rb: &Dyadic) -> AfterS {
        let f = self.f;
        let real_s = model::eval(&s);
        let z_row = self.rest.apply(f, &(&real_s - &XReal::Finite(ra.clone())));
        let tails = z_row
            .distinct()
            .into_iter()
            .map(|(i2, z)| {
                let d = &XReal::Finite(rb.clone()) - &model::eval(&z);
                (i2, z, self.rest.apply(f, &d))
            })
            .collect();
        AfterS {
            s,
            sd: real_s.as_finite().cloned(),
            z_row,
            tails,
        }
    }

    fn pair(&self, a: &Value, b: &Value, ra: &Dyadic, rb: &Dyadic, out: &mut Tallies) {
        let f = self.f;
        let sum = ra + rb;
        let in_range = sum.abs() <= self.hi;
        let ordered = canonical_exponent(f, ra) >= canonical_exponent(f, rb);
        let inputs = || json!({ "a": js(a), "b": js(b) });
        let firsts = self.first.apply(f, &XReal::Finite(sum.clone()));

        let mut cache: Vec<(AfterS, Checks)> = Vec::new();
        for i1 in 0..self.first.len() {
            let s = firsts.values[i1];
            let idx = match cache.iter().position(|(c, _)| c.s == s) {
                Some(idx) => idx,
                None => {
                    let after = self.after_s(s, ra, rb);
                    let checks = self.checks(&after, &sum, ra);
                    cache.push((after, checks));
                    cache.len() - 1
                }
            };
            let (after, checks) = &cache[idx];
            let nearest = self.first.rounder(i1).is_nearest();
            let fail = |tally: &mut Tally, what: &str, tail: Option<Tail>| {
                tally.fail(what, inputs(), self.trace(&sum, i1, &s, tail));
            };

            if in_range && ordered {
                out.exact_z.case();
                if !checks.z_exact {
                    fail(&mut out.exact_z, "s - a in V_f", None);
                }
                out.faith.case();
                if let Some(tail) = checks.not_faithful {
                    fail(&mut out.faith, "t faithful to a + b - s", Some(tail));
                }
            }
            if in_range && nearest {
                out.delta.case();
                if checks.delta.is_none() {
                    fail(&mut out.delta, "a + b - s in V_f", None);
                }
            }
            if in_range && ordered && nearest {
                out.eft.case();
                if let Some(tail) = checks.not_delta {
                    fail(&mut out.eft, "t = a + b - s", Some(tail));
                }
            }
            if !self.overflows(&firsts.rounded[i1 / 3]) {
                if let Some(i2) = after.z_row.rounded.iter().position(|r| self.overflows(r)) {
                    let mut tr = self.trace(&sum, i1, &s, None);
                    tr["spec2"] = json!(self.rest.label(i2 * 3));
                    tr["z_rounded"] = json!(after.z_row.rounded[i2].as_ref().map(js));
                    if ordered {
                        out.immune.case();
                        out.immune.fail("step 2 does not overflow", inputs(), tr);
                    } else {
                        // the statement without e_a >= e_b is false; keep evidence
                        tr["note"] = json!("e_a < e_b: outside the theorem's hypotheses");
                        out.immune.witness(json!({ "inputs": inputs(), "trace": tr }));
                    }
                } else if ordered {
                    out.immune.case();
                }
            }
            if !in_range && ordered && after.sd.as_ref().is_some_and(|d| d.abs() == self.hi) {
                out.overflow_exact.case();
                if let Some(tail) = checks.not_delta {
                    fail(&mut out.overflow_exact, "t = a + b - s at saturation", Some(tail));
                }
            }
        }
    }

    fn checks(&self, after: &AfterS, sum: &Dyadic, ra: &Dyadic) -> Checks {
        let delta_real = after.sd.as_ref().map(|d| sum - d);
        let delta = delta_real.as_ref().and_then(|d| self.to_value(&XReal::Finite(d.clone())));
        let allowed: Vec<Value> = match &delta_real {
            Some(d) => self
                .lattice
                .faithful(d)
                .iter()
                .filter_map(|x| model::encode_value(self.f, x).ok())
                .collect(),
            None => Vec::new(),
        };
        let z_exact = after
            .sd
            .as_ref()
            .is_some_and(|d| self.lattice.contains(&XReal::Finite(d - ra)));
        Checks {
            z_exact,
            not_delta: after.find(|t| Some(*t) == delta),
            not_faithful: after.find(|t| allowed.contains(t)),
            delta,
        }
    }
}

struct Checks {
    z_exact: bool,
    delta: Option<Value>,
    not_delta: Option<Tail>,
    not_faithful: Option<Tail>,
}

/// The six FastTwoSum claims over every ordered pair of finite values.
pub fn fts(f: &Format, ctx: &Ctx) -> Vec<Report> {
    let k = ctx.fts_sr_bits;
    let spec = format!(
        "each step: rd ru rz rne ro, sr:{k} all draws; x satfin ovfinf satprop; step 1 also rn-ties-down/up"
    );
    let mut out = Tallies {
        exact_z: Tally::new("fts-exact-z", f, spec.clone()),
        delta: Tally::new("fts-delta-in-f", f, spec.clone()),
        eft: Tally::new("fts-eft", f, spec.clone()),
        faith: Tally::new("fts-faith", f, spec.clone()),
        immune: Tally::new("fts-overflow-immune", f, spec.clone()),
        overflow_exact: Tally::new("fts-overflow-exact", f, spec),
    };
    let lattice = ValueLattice::new(f);
    let sweep = Sweep {
        f,
        lattice: &lattice,
        hi: lattice.max_finite().clone(),
        first: Stepper::new(k, true),
        rest: Stepper::new(k, false),
    };
    let values: Vec<(Value, Dyadic)> = lattice
        .finite()
        .iter()
        .map(|d| (model::encode_value(f, &XReal::Finite(d.clone())).expect("lattice member"), d.clone()))
        .collect();
    for (a, ra) in &values {
        for (b, rb) in &values {
            sweep.pair(a, b, ra, rb, &mut out);
        }
    }
    vec![
        out.exact_z.finish(),
        out.delta.finish(),
        out.eft.finish(),
        out.faith.finish(),
        out.immune.finish(),
        out.overflow_exact.finish(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_formats_hold() {
        let ctx = Ctx {
            fts_sr_bits: 2,
            ..Ctx::default()
        };
        for f in ["3p1se", "4p2se", "4p3sf", "5p2sf"] {
            let f: Format = f.parse().unwrap();
            for r in fts(&f, &ctx) {
                assert!(r.passed(), "{}", r.to_json_line());
                assert!(r.cases > 0, "{} {f}", r.suite);
            }
        }
    }

    #[test]
    fn unordered_overflow_is_witnessed() {
        let f: Format = "6p3se".parse().unwrap();
        let ctx = Ctx {
            fts_sr_bits: 1,
            ..Ctx::default()
        };
        let immune = fts(&f, &ctx).into_iter().find(|r| r.suite == "fts-overflow-immune").unwrap();
        assert!(immune.passed());
        assert!(!immune.witnesses.is_empty());
        let w = &immune.witnesses[0]["trace"];
        assert_eq!(w["ordered"], json!(null));
        assert!(w["note"].is_string());
    }
}
