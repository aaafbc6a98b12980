//! Bit codec against the value model: bijectivity, the reference decoder,
//! the sign reduction, region disjointness and the canonical image.

use std::collections::{HashMap, HashSet};

use p3109::codec::{self, Encoding};
use p3109::model::{self, Value};
use p3109::{Format, XReal};
use serde_json::json;

use super::{js, Ctx};
use crate::lattice::{all_values, ValueLattice};
use crate::report::{Report, Tally};

/// Encodings, algebraic values and reals are in bijection: decode is
/// injective, encode inverts it on both sides, evaluation is injective
/// and `encode_value` inverts it.
pub fn triangle(f: &Format, ctx: &Ctx) -> Vec<Report> {
    let mut t = Tally::new("triangle-isomorphism", f, "all encodings and all values");
    let codec = ctx.codec(f);
    let n_all = f.encoding_count();
    let mut seen: HashMap<Value, u64> = HashMap::new();
    for n in 0..n_all {
        let v = match codec.decode(n) {
            Ok(v) => v,
            Err(e) => {
                t.fail("decode total", json!({ "n": n }), json!(e.to_string()));
                continue;
            }
        };
        t.check(v.validate(f).is_ok(), "decode lands in the value type", || json!({ "n": n }), || js(&v));
        if let Some(prev) = seen.insert(v, n) {
            t.fail("decode injective", json!({ "n": n, "other": prev }), js(&v));
        }
        let back = codec.encode(&v).map(|e| e.0);
        t.check(back.as_ref().ok() == Some(&n), "encode(decode(n)) = n", || json!({ "n": n }), || {
            json!({ "value": js(&v), "encoded": format!("{back:?}") })
        });
    }

    let values = all_values(f);
    t.check(values.len() as u64 == n_all, "value count = 2^K", || json!(f.to_string()), || {
        json!({ "values": values.len() })
    });
    let mut reals: HashMap<XReal, Value> = HashMap::new();
    for v in &values {
        let real = model::eval(v);
        if let Some(prev) = reals.insert(real.clone(), *v) {
            t.fail("eval injective", json!({ "a": js(v), "b": js(&prev) }), js(&real));
        }
        let enc = model::encode_value(f, &real);
        t.check(enc.as_ref().ok() == Some(v), "encode_value(eval(a)) = a", || js(v), || {
            json!(format!("{enc:?}"))
        });
        let round = codec.encode(v).and_then(|n| codec.decode(n.0));
        t.check(round.as_ref().ok() == Some(v), "decode(encode(v)) = v", || js(v), || {
            json!(format!("{round:?}"))
        });
    }
    vec![t.finish()]
}

/// The decoder agrees with the independently written reference decoder.
pub fn differential(f: &Format, ctx: &Ctx) -> Vec<Report> {
    let mut t = Tally::new("differential-decode", f, "decode vs decode_reference");
    let codec = ctx.codec(f);
    for n in 0..f.encoding_count() {
        let got = codec.decode(n);
        let want = codec::decode_reference(f, Encoding(n));
        t.check(got == want, "decode = decode_reference", || json!({ "n": n }), || {
            json!({ "decode": format!("{got:?}"), "reference": format!("{want:?}") })
        });
    }
    vec![t.finish()]
}

/// Signed formats: setting the sign bit negates.
pub fn reduction(f: &Format, ctx: &Ctx) -> Vec<Report> {
    let mut t = Tally::new("reduction", f, "decode(n + 2^(K-1)) = -decode(n)");
    let codec = ctx.codec(f);
    let half = 1u64 << (f.width() - 1);
    for n in 1..half {
        let pos = codec.decode(n);
        let neg = codec.decode(n + half);
        let ok = matches!((&pos, &neg), (Ok(p), Ok(q)) if p.negate() == *q);
        t.check(ok, "negate(decode(n)) = decode(n + 2^(K-1))", || json!({ "n": n }), || {
            json!({ "pos": format!("{pos:?}"), "neg": format!("{neg:?}") })
        });
    }
    vec![t.finish()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Region {
    NaN,
    Inf,
    Zero,
    Subnormal,
    Normal,
}

/// The decoder's branches have pairwise disjoint images: one NaN, one
/// zero, the right number of infinities, and no real shared between the
/// subnormal and normal ranges or within either.
pub fn regions(f: &Format, ctx: &Ctx) -> Vec<Report> {
    let mut t = Tally::new("region-disjointness", f, "images of decode branches");
    let codec = ctx.codec(f);
    let mut counts: HashMap<Region, u64> = HashMap::new();
    let mut owner: HashMap<XReal, (Region, u64)> = HashMap::new();
    for n in 0..f.encoding_count() {
        let Ok(v) = codec.decode(n) else {
            t.fail("decode total", json!({ "n": n }), json!(null));
            continue;
        };
        let region = match v {
            Value::NaN => Region::NaN,
            Value::Inf { .. } => Region::Inf,
            Value::Finite { m: 0, .. } => Region::Zero,
            Value::Finite { m, e } if model::is_subnormal(f, m, e) => Region::Subnormal,
            Value::Finite { .. } => Region::Normal,
        };
        *counts.entry(region).or_default() += 1;
        let real = model::eval(&v);
        if let Some((r0, n0)) = owner.insert(real.clone(), (region, n)) {
            t.fail(
                "branch images disjoint",
                json!({ "n": n, "other": n0 }),
                json!({ "real": js(&real), "regions": [format!("{r0:?}"), format!("{region:?}")] }),
            );
        } else {
            t.case();
        }
    }
    let infinities = f.is_extended() as u64 * (1 + f.is_signed() as u64);
    for (region, want) in [(Region::NaN, 1), (Region::Zero, 1), (Region::Inf, infinities)] {
        let got = counts.get(&region).copied().unwrap_or(0);
        t.check(got == want, "special region sizes", || json!(format!("{region:?}")), || {
            json!({ "count": got, "expected": want })
        });
    }
    vec![t.finish()]
}

/// A pair `(m, e)` is a valid finite value exactly when some encoding
/// decodes to it; checked over a box around the exponent range.
pub fn canonical_image(f: &Format, ctx: &Ctx) -> Vec<Report> {
    let mut t = Tally::new("canonical-codec", f, "canonical(m, e) iff in decode image");
    let codec = ctx.codec(f);
    let image: HashSet<Value> = (0..f.encoding_count()).filter_map(|n| codec.decode(n).ok()).collect();
    let bound = 1i64 << (f.precision() + 1);
    for e in f.emin_lsb() - 2..=f.emax_lsb() + 2 {
        for m in -bound..=bound {
            let v = Value::Finite { m, e };
            let valid = v.validate(f).is_ok();
            let canonical = model::is_canonical(f, m, e);
            let sign_ok = f.is_signed() || m >= 0;
            t.check(valid == (canonical && sign_ok), "valid = canonical and sign rule", || json!({ "m": m, "e": e }), || {
                json!({ "valid": valid, "canonical": canonical })
            });
            let decoded = image.contains(&v);
            t.check(valid == decoded, "valid iff decoded", || json!({ "m": m, "e": e }), || {
                json!({ "valid": valid, "in_image": decoded })
            });
        }
    }
    vec![t.finish()]
}

/// The codec's finite reals, sorted and deduplicated, are the lattice.
pub fn lattice_vs_codec(f: &Format, ctx: &Ctx) -> Vec<Report> {
    let mut t = Tally::new("lattice-codec", f, "enumerate vs value lattice");
    let codec = ctx.codec(f);
    let rows = match codec::enumerate_with(&codec) {
        Ok(rows) => rows,
        Err(e) => {
            t.fail("enumerate", json!(f.to_string()), json!(e.to_string()));
            return vec![t.finish()];
        }
    };
    let mut reals: Vec<_> = rows.iter().filter_map(|r| r.real.as_finite().cloned()).collect();
    reals.sort();
    reals.dedup();
    let lattice = ValueLattice::new(f);
    t.check(reals == lattice.finite(), "finite reals = lattice", || json!(f.to_string()), || {
        json!({ "codec": reals.len(), "lattice": lattice.finite().len() })
    });
    t.check(
        rows.len() == lattice.size(),
        "row count = lattice size",
        || json!(f.to_string()),
        || json!({ "rows": rows.len(), "lattice": lattice.size() }),
    );
    vec![t.finish()]
}
