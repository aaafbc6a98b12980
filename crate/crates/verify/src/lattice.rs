//! Brute-force view of a format's value set, built from the canonicality
//! predicates alone (no codec involved), with neighbour queries.

use p3109::model::Value;
use p3109::{Dyadic, Format, XReal};

/// Sorted finite values of a format, plus which infinities it has.
#[derive(Debug, Clone)]
pub struct ValueLattice {
    format: Format,
    finite: Vec<Dyadic>,
    pos_inf: bool,
    neg_inf: bool,
}

impl ValueLattice {
    /// Enumerates every `(m, e)` with `|m| < 2^P` and
    /// `emin_lsb <= e <= emax_lsb`, keeping the valid ones.
    pub fn new(f: &Format) -> ValueLattice {
        let mut finite: Vec<Dyadic> = valid_finite(f)
            .into_iter()
            .map(|v| match v {
                Value::Finite { m, e } => Dyadic::new(m, e),
                _ => unreachable!(),
            })
            .collect();
        finite.sort();
        finite.dedup();
        ValueLattice {
            format: *f,
            finite,
            pos_inf: Value::POS_INF.validate(f).is_ok(),
            neg_inf: Value::NEG_INF.validate(f).is_ok(),
        }
    }

    pub fn format(&self) -> &Format {
        &self.format
    }

    pub fn finite(&self) -> &[Dyadic] {
        &self.finite
    }

    /// Number of members including infinities and NaN.
    pub fn size(&self) -> usize {
        self.finite.len() + self.pos_inf as usize + self.neg_inf as usize + 1
    }

    pub fn max_finite(&self) -> &Dyadic {
        self.finite.last().expect("non-empty")
    }

    pub fn min_finite(&self) -> &Dyadic {
        self.finite.first().expect("non-empty")
    }

    pub fn contains(&self, x: &XReal) -> bool {
        match x {
            XReal::Finite(d) => self.finite.binary_search(d).is_ok(),
            XReal::PosInf => self.pos_inf,
            XReal::NegInf => self.neg_inf,
            XReal::NaN => true,
        }
    }

    /// Largest member strictly below `x`; `-Inf` below the finite range.
    pub fn pred(&self, x: &Dyadic) -> XReal {
        let idx = self.finite.partition_point(|v| v < x);
        if idx == 0 {
            XReal::NegInf
        } else {
            XReal::Finite(self.finite[idx - 1].clone())
        }
    }

    /// Smallest member strictly above `x`; `+Inf` above the finite range.
    pub fn succ(&self, x: &Dyadic) -> XReal {
        let idx = self.finite.partition_point(|v| v <= x);
        match self.finite.get(idx) {
            Some(v) => XReal::Finite(v.clone()),
            None => XReal::PosInf,
        }
    }

    /// The faithful roundings of `x`: `{x}` for members, otherwise both
    /// neighbours.
    pub fn faithful(&self, x: &Dyadic) -> Vec<XReal> {
        if self.finite.binary_search(x).is_ok() {
            vec![XReal::Finite(x.clone())]
        } else {
            vec![self.pred(x), self.succ(x)]
        }
    }

    /// Finite members at minimal distance from `x`.
    pub fn nearest(&self, x: &Dyadic) -> Vec<Dyadic> {
        let mut best: Option<Dyadic> = None;
        let mut out = Vec::new();
        for v in &self.finite {
            let dist = (v - x).abs();
            match &best {
                Some(b) if dist > *b => {}
                Some(b) if dist == *b => out.push(v.clone()),
                _ => {
                    best = Some(dist);
                    out = vec![v.clone()];
                }
            }
        }
        out
    }

    /// Gap between `x` and the next finite member above it, if any.
    pub fn gap_above(&self, x: &Dyadic) -> Option<Dyadic> {
        match self.succ(x) {
            XReal::Finite(s) => Some(&s - x),
            _ => None,
        }
    }
}

/// Probe points for rounding: every member, every midpoint between
/// consecutive members, the quarter points either side of each midpoint,
/// and points beyond the finite range on both sides.
pub fn midpoint_lattice(f: &Format) -> Vec<Dyadic> {
    let lattice = ValueLattice::new(f);
    let mut pts: Vec<Dyadic> = Vec::new();
    let vals = lattice.finite();
    for w in vals.windows(2) {
        let gap = &w[1] - &w[0];
        pts.push(w[0].clone());
        for q in 1..4 {
            pts.push(&w[0] + &gap.scale(-2).mul_small(q));
        }
    }
    pts.push(vals.last().unwrap().clone());

    // overflow probes on the top binade's spacing
    let ulp = Dyadic::pow2(f.emax_lsb());
    let hi = lattice.max_finite().clone();
    let mut beyond = Vec::new();
    for q in 1..=8 {
        beyond.push(&hi + &ulp.scale(-2).mul_small(q));
    }
    beyond.push(&hi + &hi);
    beyond.push(hi.scale(2));
    beyond.push(hi.scale(3) + ulp.scale(-3));
    pts.extend(beyond.iter().cloned());
    // mirror below the range: for signed formats that is -beyond, for
    // unsigned formats a handful of negatives
    if f.is_signed() {
        pts.extend(beyond.iter().map(|d| -d));
    } else {
        let tiny = Dyadic::pow2(f.emin_lsb());
        pts.push(-&tiny.scale(-1));
        pts.push(-&tiny);
        pts.push(-&hi);
        pts.extend(beyond.iter().map(|d| -d));
    }
    pts.sort();
    pts.dedup();
    pts
}

trait MulSmall {
    fn mul_small(&self, k: i64) -> Dyadic;
}

impl MulSmall for Dyadic {
    fn mul_small(&self, k: i64) -> Dyadic {
        Dyadic::new(self.significand() * k, self.exponent())
    }
}

/// The `P`-bit grid `{m * 2^e : |m| < 2^P, e >= emin_lsb}` that rounding
/// targets before saturation, cut off a few binades above the finite
/// range.
#[derive(Debug, Clone)]
pub struct Grid {
    points: Vec<Dyadic>,
}

impl Grid {
    /// Covers at least `[-16 * M_hi, 16 * M_hi]`.
    pub fn new(f: &Format) -> Grid {
        let bound = 1i64 << f.precision();
        let mut points = Vec::new();
        for e in f.emin_lsb()..=f.emax_lsb() + 5 {
            for m in (1 - bound)..bound {
                points.push(Dyadic::new(m, e));
            }
        }
        points.sort();
        points.dedup();
        Grid { points }
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        self.points.binary_search(x).is_ok()
    }

    /// Largest grid point `<= x`.
    pub fn floor(&self, x: &Dyadic) -> Option<&Dyadic> {
        let idx = self.points.partition_point(|v| v <= x);
        idx.checked_sub(1).map(|i| &self.points[i])
    }

    /// Smallest grid point `>= x`.
    pub fn ceil(&self, x: &Dyadic) -> Option<&Dyadic> {
        let idx = self.points.partition_point(|v| v < x);
        self.points.get(idx)
    }

    pub fn points(&self) -> &[Dyadic] {
        &self.points
    }
}

fn valid_finite(f: &Format) -> Vec<Value> {
    let bound = 1i64 << f.precision();
    let mut out = Vec::new();
    for e in f.emin_lsb()..=f.emax_lsb() {
        for m in (1 - bound)..bound {
            let v = Value::Finite { m, e };
            if v.validate(f).is_ok() {
                out.push(v);
            }
        }
    }
    out
}

/// Every valid value of `f`, straight from the model's predicates: NaN,
/// any infinities, then the finite values.
pub fn all_values(f: &Format) -> Vec<Value> {
    let mut out = vec![Value::NaN];
    if Value::POS_INF.validate(f).is_ok() {
        out.push(Value::POS_INF);
    }
    if Value::NEG_INF.validate(f).is_ok() {
        out.push(Value::NEG_INF);
    }
    out.extend(valid_finite(f));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fmt(s: &str) -> Format {
        s.parse().unwrap()
    }

    fn d(s: &str) -> Dyadic {
        Dyadic::parse(s).unwrap()
    }

    #[test]
    fn neighbours_8p4se() {
        let l = ValueLattice::new(&fmt("8p4se"));
        assert_eq!(l.succ(&d("1")), XReal::Finite(d("1.125")));
        assert_eq!(l.pred(&d("1")), XReal::Finite(d("0.9375")));
        assert_eq!(l.succ(&d("224")), XReal::PosInf);
        assert_eq!(l.pred(&d("-224")), XReal::NegInf);
        let x = d("1.125");
        match l.succ(&x) {
            XReal::Finite(s) => assert_eq!(l.pred(&s), XReal::Finite(x)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sizes() {
        for f in Format::all(3, 8) {
            let l = ValueLattice::new(&f);
            assert_eq!(l.size() as u64, f.encoding_count(), "{f}");
            assert_eq!(l.finite().iter().filter(|v| v.is_zero()).count(), 1, "{f}");
        }
    }

    #[test]
    fn probes_4p2se() {
        let f = fmt("4p2se");
        let pts = midpoint_lattice(&f);
        assert!(pts.contains(&d("1.25")));
        let hi = f.max_finite();
        let half_ulp = Dyadic::pow2(f.emax_lsb() - 1);
        assert!(pts.contains(&(&hi + &half_ulp)));
        assert!(pts.contains(&(&hi + &hi)));
        for v in ValueLattice::new(&f).finite() {
            assert!(pts.contains(v));
        }
    }

    #[test]
    fn nearest_ties() {
        let l = ValueLattice::new(&fmt("4p2se"));
        assert_eq!(l.nearest(&d("1.25")), vec![d("1"), d("1.5")]);
        assert_eq!(l.nearest(&d("1.3125")), vec![d("1.5")]);
    }

    #[test]
    fn grid_neighbours() {
        let f = fmt("8p4se");
        let g = Grid::new(&f);
        assert_eq!(g.floor(&d("8.5")), Some(&d("8")));
        assert_eq!(g.ceil(&d("8.5")), Some(&d("9")));
        // 240 is on the grid though not in the value set
        assert!(g.contains(&d("240")));
        assert!(g.contains(&d("448")));
        assert_eq!(g.ceil(&d("225")), Some(&d("240")));
        assert!(g.ceil(&f.max_finite().scale(3)).is_some());
    }
}
