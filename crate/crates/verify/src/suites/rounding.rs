//! RoundToPrecision against the grid oracle.

use p3109::rounding::{round_to_precision, FixedEntropy};
use p3109::{Dyadic, Format, RoundingMode};
use serde_json::json;

use super::{js, Ctx};
use crate::lattice::{midpoint_lattice, Grid, ValueLattice};
use crate::report::{Report, Tally};
use crate::rn::{mode_sweep, Rounder};

fn mode_label(mode: RoundingMode, draw: u64) -> String {
    match mode {
        RoundingMode::SR(_) => format!("{mode}@{draw}"),
        _ => mode.to_string(),
    }
}

/// Faithfulness, exactness, monotonicity, weak monotonicity and carry
/// renormalization over the probe lattice, for every mode and every
/// stochastic draw.
pub fn rounding(f: &Format, ctx: &Ctx) -> Vec<Report> {
    let spec = format!("rd ru rz rne ro, sr:1..{} all draws", ctx.sr_bits);
    let mut faithful = Tally::new("round-faithful", f, spec.clone());
    let mut exact = Tally::new("round-exact", f, spec.clone());
    let mut monotonic = Tally::new("round-monotonic", f, "rd ru rz rne ro");
    let mut weak = Tally::new("round-weak-monotonic", f, spec.clone());
    let mut carry = Tally::new("round-carry", f, spec);

    let grid = Grid::new(f);
    let points = midpoint_lattice(f);
    let p = f.precision();

    for (mode, draw) in mode_sweep(ctx.sr_bits) {
        let label = mode_label(mode, draw);
        let mut prev: Option<(&Dyadic, Dyadic)> = None;
        for x in &points {
            let r = round_to_precision(f, x, mode, &mut FixedEntropy(draw));
            let inputs = || json!({ "x": js(x), "mode": label });
            let lo = grid.floor(x).expect("grid covers probes");
            let hi = grid.ceil(x).expect("grid covers probes");
            faithful.check(r == *lo || r == *hi, "result in {floor, ceil}", inputs, || {
                json!({ "result": js(&r), "floor": js(lo), "ceil": js(hi) })
            });
            if grid.contains(x) {
                exact.check(r == *x, "grid points are fixed", inputs, || js(&r));
            }
            // every grid point v >= x bounds the result above, every v <= x below
            weak.check(r <= *hi && r >= *lo, "grid points bound the result", inputs, || {
                json!({ "result": js(&r), "below": js(lo), "above": js(hi) })
            });
            carry.check(
                r.significand().bits() <= p as u64,
                "stored significand fits P bits",
                inputs,
                || json!(format!("{r:?}")),
            );
            if mode.is_monotonic() {
                if let Some((px, pr)) = &prev {
                    monotonic.check(*pr <= r, "x <= y implies rnd(x) <= rnd(y)", inputs, || {
                        json!({ "prev_x": js(*px), "prev": js(pr), "result": js(&r) })
                    });
                }
                prev = Some((x, r));
            }
        }
    }

    // rounding up just below each binade top lands on the next power of two
    let p = p as i64;
    for e in f.emin()..=f.emax() + 1 {
        let top = Dyadic::pow2(e + 1);
        let x = &top - &Dyadic::pow2(e - p - 1);
        for (mode, neg) in [(RoundingMode::RU, false), (RoundingMode::RD, true)] {
            let input = if neg { -&x } else { x.clone() };
            let r = round_to_precision(f, &input, mode, &mut FixedEntropy(0));
            let want_m = if neg { -(1i64 << (p - 1)) } else { 1i64 << (p - 1) };
            let ok = r.significand() == &num_bigint::BigInt::from(want_m) && r.exponent() == e + 2 - p;
            carry.check(ok, "binade carry renormalizes to 2^(P-1)", || json!({ "x": js(&input), "mode": mode.to_string() }), || {
                json!(format!("{r:?}"))
            });
        }
    }
    vec![faithful.finish(), exact.finish(), monotonic.finish(), weak.finish(), carry.finish()]
}

fn even_exponent(v: &Dyadic) -> bool {
    match v.msb_exponent() {
        Ok(e) => e.rem_euclid(2) == 0,
        Err(_) => true,
    }
}

/// `P = 1`: a midpoint between consecutive grid points rounds under RNE
/// to the neighbour whose exponent is even; zero counts as even and wins
/// when both neighbours are even.
pub fn rne_p1_ties(f: &Format, _ctx: &Ctx) -> Vec<Report> {
    let mut t = Tally::new("rne-p1-ties", f, "rne on every midpoint");
    let grid = Grid::new(f);
    for w in grid.points().windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let mid = (lo + hi).scale(-1);
        let want = match (even_exponent(lo), even_exponent(hi)) {
            (true, false) => lo,
            (false, true) => hi,
            _ if lo.is_zero() => lo,
            _ => hi,
        };
        let r = round_to_precision(f, &mid, RoundingMode::RNE, &mut FixedEntropy(0));
        t.check(r == *want, "tie goes to the even exponent", || json!({ "x": js(&mid) }), || {
            json!({ "result": js(&r), "expected": js(want), "lo": js(lo), "hi": js(hi) })
        });
    }
    vec![t.finish()]
}

/// Nearest-type rounders return a value at minimal distance over the
/// value set, checked by linear scan; directed tie breaks pick the right
/// side and RNE with `P > 1` picks an even significand.
pub fn nearest_oracle(f: &Format, _ctx: &Ctx) -> Vec<Report> {
    let mut t = Tally::new("nearest-oracle", f, "rne, rn-ties-down, rn-ties-up");
    let lattice = ValueLattice::new(f);
    let (lo, hi) = (lattice.min_finite().clone(), lattice.max_finite().clone());
    let rounders = [
        Rounder::Mode(RoundingMode::RNE, 0),
        Rounder::NearestTiesDown,
        Rounder::NearestTiesUp,
    ];
    for x in midpoint_lattice(f).iter().filter(|x| **x >= lo && **x <= hi) {
        let nearest = lattice.nearest(x);
        for rnd in rounders {
            let r = rnd.round(f, x);
            let inputs = || json!({ "x": js(x), "rounder": rnd.to_string() });
            let trace = || json!({ "result": js(&r), "nearest": js(&nearest) });
            t.check(nearest.contains(&r), "result at minimal distance", inputs, trace);
            if nearest.len() == 2 {
                let ok = match rnd {
                    Rounder::NearestTiesDown => r == nearest[0],
                    Rounder::NearestTiesUp => r == nearest[1],
                    _ if f.precision() > 1 => {
                        let e = r.msb_exponent().map_or(f.emin(), |e| e.max(f.emin()));
                        r.significand_at(e - f.precision() as i64 + 1)
                            .is_some_and(|m| m.iter_u64_digits().next().unwrap_or(0) % 2 == 0)
                    }
                    _ => true,
                };
                t.check(ok, "tie break", inputs, trace);
            }
        }
    }
    vec![t.finish()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_formats_pass() {
        let ctx = Ctx {
            sr_bits: 2,
            ..Ctx::default()
        };
        for f in Format::all(3, 4) {
            for r in rounding(&f, &ctx).into_iter().chain(nearest_oracle(&f, &ctx)) {
                assert!(r.passed(), "{}", r.to_json_line());
                assert!(r.cases > 0, "{}", r.suite);
            }
        }
    }

    #[test]
    fn p1_ties() {
        for f in Format::all(3, 6).into_iter().filter(|f| f.precision() == 1) {
            let r = rne_p1_ties(&f, &Ctx::default()).remove(0);
            assert!(r.passed(), "{}", r.to_json_line());
        }
    }

    #[test]
    fn even_exponent_oracle() {
        assert!(even_exponent(&Dyadic::from_int(4)));
        assert!(!even_exponent(&Dyadic::from_int(2)));
        assert!(even_exponent(&Dyadic::zero()));
    }
}
