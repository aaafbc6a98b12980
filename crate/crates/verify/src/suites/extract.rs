//! ExtractScalar conditions (a) to (d), and the precision-one witness
//! search for (d).

use p3109::algorithms::{extract_scalar, EsTrace, SplitDepth};
use p3109::model::{self, Value};
use p3109::{Dyadic, Format, SatMode, XReal};
use serde_json::json;

use super::{js, Ctx};
use crate::lattice::ValueLattice;
use crate::report::{Report, Tally};

fn sat_triples() -> Vec<[SatMode; 3]> {
    let mut out = Vec::new();
    for a in SatMode::ALL {
        for b in SatMode::ALL {
            for c in SatMode::ALL {
                out.push([a, b, c]);
            }
        }
    }
    out
}

fn finite(v: &Value) -> Option<Dyadic> {
    match model::eval(v) {
        XReal::Finite(d) => Some(d),
        _ => None,
    }
}

/// Every admissible `(sigma, x)`: `sigma = 2^i` in the format, `x` finite
/// with `|x| <= sigma` and `|sigma + x| <= M_hi`.
fn admissible(f: &Format, lattice: &ValueLattice) -> Vec<(Value, i64, Value, Dyadic)> {
    let hi = lattice.max_finite();
    let to_value = |d: &Dyadic| model::encode_value(f, &XReal::Finite(d.clone())).expect("lattice member");
    let mut out = Vec::new();
    for sigma in lattice.finite().iter().filter(|d| d.is_positive()) {
        let i = sigma.msb_exponent().expect("positive");
        if *sigma != Dyadic::pow2(i) {
            continue;
        }
        for x in lattice.finite() {
            if x.abs() > *sigma || (sigma + x).abs() > *hi {
                continue;
            }
            out.push((to_value(sigma), i, to_value(x), x.clone()));
        }
    }
    out
}

/// The `j` values to check: `0..=j_max`, or a range past the format's
/// exponent span when `x = 0`.
fn depths(f: &Format, tr: &EsTrace) -> Vec<i64> {
    match tr.j {
        SplitDepth::Max(j) => (0..=j).collect(),
        SplitDepth::Unbounded => (0..=tr.i - f.emin_lsb() + 1).collect(),
        SplitDepth::Exceeds => Vec::new(),
    }
}

struct Conditions {
    a: bool,
    b: bool,
    c: bool,
    /// Largest `j` for which (d) fails, if any.
    d_fails_at: Option<i64>,
}

fn conditions(f: &Format, tr: &EsTrace, x: &Dyadic) -> Conditions {
    let p = f.precision() as i64;
    let (Some(xh), Some(xl)) = (finite(&tr.x_h), finite(&tr.x_l)) else {
        return Conditions {
            a: false,
            b: false,
            c: false,
            d_fails_at: Some(0),
        };
    };
    let unit = Dyadic::pow2(tr.i - p);
    let d_fails_at = depths(f, tr)
        .into_iter()
        .rev()
        .find(|j| xh.abs() > Dyadic::pow2(tr.i - j));
    Conditions {
        a: &xh + &xl == *x,
        b: xl.abs() <= unit,
        c: xh.is_multiple_of_pow2(tr.i - p),
        d_fails_at,
    }
}

/// Conditions (a) to (d) for every admissible input, every valid `j` and
/// every saturation triple. Meant for `P >= 2`.
pub fn extract(f: &Format, _ctx: &Ctx) -> Vec<Report> {
    let mut t = Tally::new("extract-scalar", f, "rne; all sat triples; j = 0..=j_max");
    let lattice = ValueLattice::new(f);
    for (sigma, _, x, xr) in admissible(f, &lattice) {
        for sats in sat_triples() {
            let tr = match extract_scalar(f, &sigma, &x, sats) {
                Ok(tr) => tr,
                Err(e) => {
                    t.fail("runs", json!({ "sigma": js(&sigma), "x": js(&x) }), json!(e.to_string()));
                    continue;
                }
            };
            let c = conditions(f, &tr, &xr);
            let inputs = || json!({ "sigma": js(&sigma), "x": js(&x), "sats": js(&sats) });
            t.check(c.a, "(a) x = x_h + x_l", inputs, || js(&tr));
            t.check(c.b, "(b) |x_l| <= 2^-P sigma", inputs, || js(&tr));
            t.check(c.c, "(c) x_h in 2^-P sigma Z", inputs, || js(&tr));
            for j in depths(f, &tr) {
                let ok = c.d_fails_at.map_or(true, |bad| j > bad);
                t.check(ok, "(d) |x_h| <= 2^-j sigma", || json!({ "sigma": js(&sigma), "x": js(&x), "j": j }), || js(&tr));
            }
        }
    }
    vec![t.finish()]
}

/// Searches precision-one signed formats for inputs meeting every
/// precondition but `P > 1` where (a) holds and (d) fails. Fails when no
/// format yields a witness.
pub fn extract_p1(formats: &[Format], _ctx: &Ctx) -> Vec<Report> {
    let label = match (formats.first(), formats.last()) {
        (Some(a), Some(b)) => format!("{a}..{b}"),
        _ => "none".to_string(),
    };
    let mut t = Tally::new("extract-scalar-d-p1", label, "rne; satfin; witness search");
    let mut found = 0u64;
    for f in formats {
        let lattice = ValueLattice::new(f);
        for (sigma, _, x, xr) in admissible(f, &lattice) {
            let sats = [SatMode::SatFinite; 3];
            let Ok(tr) = extract_scalar(f, &sigma, &x, sats) else {
                continue;
            };
            t.case();
            let c = conditions(f, &tr, &xr);
            if let (true, Some(j)) = (c.a, c.d_fails_at) {
                found += 1;
                t.witness(json!({
                    "format": f.to_string(),
                    "sigma": js(&finite(&sigma)),
                    "x": js(&xr),
                    "j": j,
                    "x_h": js(&finite(&tr.x_h)),
                    "x_l": js(&finite(&tr.x_l)),
                    "bound": js(&Dyadic::pow2(tr.i - j)),
                }));
            }
        }
    }
    if found == 0 {
        t.fail("some P = 1 input violates (d)", json!(null), json!({ "witnesses": 0 }));
    }
    vec![t.finish()]
}
