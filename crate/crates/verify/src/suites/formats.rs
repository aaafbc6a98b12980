//! Derived-constant cross-checks against the codec.

use p3109::model::{self, Value};
use p3109::{Format, XReal};
use serde_json::json;

use super::{js, Ctx};
use crate::lattice::ValueLattice;
use crate::report::{Report, Tally};

fn msb(m: i64, e: i64) -> i64 {
    e + (64 - m.unsigned_abs().leading_zeros() as i64) - 1
}

/// `emax` is the MSB exponent of the value at `n_fmax`, `n_fmax` is the
/// last finite encoding before the reserved slots, and `M_hi` is the
/// largest element of the value set.
pub fn emax_consistency(f: &Format, ctx: &Ctx) -> Vec<Report> {
    let mut t = Tally::new("emax-consistency", f, "decode(n_fmax) vs derived constants");
    let codec = ctx.codec(f);
    let n_fmax = f.max_finite_encoding();
    let inputs = || json!({ "n_fmax": n_fmax });
    match codec.decode(n_fmax) {
        Ok(Value::Finite { m, e }) if m != 0 => {
            let got = msb(m, e);
            t.check(got == f.emax(), "emax = msb(decode(n_fmax))", inputs, || {
                json!({ "msb": got, "emax": f.emax(), "m": m, "e": e })
            });
            let real = model::eval(&Value::Finite { m, e });
            let lattice = ValueLattice::new(f);
            t.check(
                real == XReal::Finite(lattice.max_finite().clone()),
                "M_hi = max of value set",
                inputs,
                || json!({ "decoded": js(&real), "lattice_max": js(lattice.max_finite()) }),
            );
            t.check(
                real == XReal::Finite(f.max_finite()),
                "M_hi = eval(decode(n_fmax))",
                inputs,
                || json!({ "decoded": js(&real), "max_finite": js(&f.max_finite()) }),
            );
        }
        other => t.fail("decode(n_fmax) is a non-zero finite value", inputs(), json!(format!("{other:?}"))),
    }

    // n_fmax is the largest non-negative encoding that decodes finite
    let top = if f.is_signed() {
        (1u64 << (f.width() - 1)) - 1
    } else {
        f.encoding_count() - 1
    };
    let last_finite = (0..=top)
        .rev()
        .find(|&n| matches!(codec.decode(n), Ok(Value::Finite { .. })));
    t.check(last_finite == Some(n_fmax), "n_fmax = last finite encoding", inputs, || {
        json!({ "last_finite": last_finite })
    });

    let w = f.exponent_width() as i64;
    let p = f.precision() as i64;
    t.check(
        f.emin() == 1 - f.bias() && f.emin_lsb() == f.emin() - p + 1 && f.emax_lsb() == f.emax() - p + 1,
        "exponent bounds relations",
        inputs,
        || js(&f.derive().emin),
    );
    t.check(f.bias() == 1 << (w - 1), "B = 2^(W-1)", inputs, || json!(f.bias()));
    vec![t.finish()]
}

/// Unsigned extended formats: `emax` for `P = 1, 2` and the `+Inf` slot.
pub fn emax_errata(f: &Format, ctx: &Ctx) -> Vec<Report> {
    let mut t = Tally::new("emax-errata", f, "unsigned extended emax and infinity slot");
    let codec = ctx.codec(f);
    let k = f.width();
    let w = (k - f.precision() + 1) as i64;
    let b = 1i64 << (w - 1);
    let default = (1i64 << w) - 1 - b;
    let inputs = || json!({ "format": f.to_string() });
    let emax = match codec.decode(f.max_finite_encoding()) {
        Ok(Value::Finite { m, e }) if m != 0 => msb(m, e),
        other => {
            t.fail("decode(n_fmax) is a non-zero finite value", inputs(), json!(format!("{other:?}")));
            return vec![t.finish()];
        }
    };
    let expected = match f.precision() {
        1 => Some((1i64 << w) - 3 - b),
        2 => Some((1i64 << w) - 2 - b),
        _ => None,
    };
    if let Some(expected) = expected {
        t.check(emax == expected, "emax special case", inputs, || {
            json!({ "emax": emax, "expected": expected })
        });
        t.check(emax != default, "emax differs from 2^W-1-B", inputs, || {
            json!({ "emax": emax, "default": default })
        });
        t.check(f.emax() == expected, "derived emax", inputs, || json!({ "derived": f.emax() }));
    }
    let inf_slot = f.encoding_count() - 2;
    let decoded = codec.decode(inf_slot);
    t.check(decoded == Ok(Value::POS_INF), "decode(2^K-2) = +Inf", inputs, || {
        json!(format!("{decoded:?}"))
    });
    let encoded = codec.encode(&Value::POS_INF);
    t.check(
        encoded.as_ref().map(|n| n.0).ok() == Some(inf_slot),
        "encode(+Inf) = 2^K-2",
        inputs,
        || json!(format!("{encoded:?}")),
    );
    vec![t.finish()]
}

/// Table of reserved encodings, written out from the format class.
fn reserved(f: &Format) -> Vec<(u64, Value)> {
    let k = f.width();
    let full = 1u64 << k;
    let half = full / 2;
    match (f.is_signed(), f.is_extended()) {
        (true, false) => vec![(half, Value::NaN)],
        (true, true) => vec![(half, Value::NaN), (half - 1, Value::POS_INF), (full - 1, Value::NEG_INF)],
        (false, false) => vec![(full - 1, Value::NaN)],
        (false, true) => vec![(full - 1, Value::NaN), (full - 2, Value::POS_INF)],
    }
}

/// Special values decode exactly at their reserved encodings.
pub fn reserved_encodings(f: &Format, ctx: &Ctx) -> Vec<Report> {
    let mut t = Tally::new("reserved-encodings", f, "specials decoded iff reserved");
    let codec = ctx.codec(f);
    let table = reserved(f);
    t.check(table.len() as u64 == f.reserved_count(), "reserved count", || js(&f.to_string()), || {
        json!({ "table": table.len(), "reserved_count": f.reserved_count() })
    });
    for n in 0..f.encoding_count() {
        let got = codec.decode(n);
        let want = table.iter().find(|(slot, _)| *slot == n).map(|(_, v)| *v);
        let ok = match (&got, want) {
            (Ok(v), Some(w)) => *v == w,
            (Ok(v), None) => v.is_finite(),
            (Err(_), _) => false,
        };
        t.check(ok, "special iff reserved slot", || json!({ "n": n }), || {
            json!({ "decoded": format!("{got:?}"), "reserved": want.map(|v| js(&v)) })
        });
    }
    vec![t.finish()]
}
