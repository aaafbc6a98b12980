//! The projection pipeline against the value lattice.

use p3109::model::{self, Value};
use p3109::projection::project;
use p3109::rounding::{round_to_precision, FixedEntropy};
use p3109::{Format, ProjectionSpec, SatMode, XReal};
use serde_json::json;

use super::{js, Ctx};
use crate::lattice::{midpoint_lattice, ValueLattice};
use crate::report::{Report, Tally};
use crate::rn::mode_sweep;

/// In-range identity, faithfulness (signed formats), the overflow image
/// and closure, for every mode, draw and saturation mode.
pub fn projection(f: &Format, ctx: &Ctx) -> Vec<Report> {
    let spec = format!("rd ru rz rne ro, sr:1..{} all draws; satfin ovfinf satprop", ctx.sr_bits);
    let mut identity = Tally::new("project-identity", f, spec.clone());
    let mut faith = Tally::new("project-faith", f, spec.clone());
    let mut overflow = Tally::new("project-overflow", f, spec.clone());
    let mut closure = Tally::new("project-closure", f, spec);

    let lattice = ValueLattice::new(f);
    let (lo, hi) = (lattice.min_finite().clone(), lattice.max_finite().clone());
    let points = midpoint_lattice(f);
    let hi_image = [XReal::Finite(hi.clone()), XReal::PosInf];
    let lo_image = [XReal::Finite(lo.clone()), XReal::NegInf];

    for (mode, draw) in mode_sweep(ctx.sr_bits) {
        for sat in SatMode::ALL {
            let spec = ProjectionSpec::new(mode, sat);
            let label = match mode {
                p3109::RoundingMode::SR(_) => format!("{spec}@{draw}"),
                _ => spec.to_string(),
            };
            for x in &points {
                let xr = XReal::Finite(x.clone());
                let v = project(f, &xr, spec, &mut FixedEntropy(draw));
                let got = model::eval(&v);
                let inputs = || json!({ "x": js(x), "spec": label });
                if *x >= lo && *x <= hi {
                    let r = round_to_precision(f, x, mode, &mut FixedEntropy(draw));
                    identity.check(got == XReal::Finite(r.clone()), "project = round in range", inputs, || {
                        json!({ "project": js(&got), "round": js(&r) })
                    });
                }
                if f.is_signed() {
                    let allowed = lattice.faithful(x);
                    faith.check(allowed.contains(&got), "project is faithful", inputs, || {
                        json!({ "project": js(&got), "allowed": js(&allowed) })
                    });
                    if *x < lo {
                        overflow.check(lo_image.contains(&got), "below M_lo gives M_lo or -Inf", inputs, || js(&got));
                    }
                }
                if *x > hi {
                    overflow.check(hi_image.contains(&got), "above M_hi gives M_hi or +Inf", inputs, || js(&got));
                }
                closure.check(
                    v.validate(f).is_ok() && lattice.contains(&got),
                    "result in value set",
                    inputs,
                    || js(&v),
                );
            }
            for special in [XReal::PosInf, XReal::NegInf, XReal::NaN] {
                let v = project(f, &special, spec, &mut FixedEntropy(draw));
                closure.check(
                    v.validate(f).is_ok() && lattice.contains(&model::eval(&v)),
                    "result in value set",
                    || json!({ "x": js(&special), "spec": label }),
                    || js(&v),
                );
                if special == XReal::NaN {
                    closure.check(v == Value::NaN, "NaN propagates", || json!({ "spec": label }), || js(&v));
                }
            }
        }
    }
    let mut out = vec![identity.finish()];
    if f.is_signed() {
        out.push(faith.finish());
    }
    out.push(overflow.finish());
    out.push(closure.finish());
    out
}
