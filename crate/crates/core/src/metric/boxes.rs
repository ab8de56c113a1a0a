//! Symbolic axis-aligned boxes in the sup metric.
//!
//! A [`BoxSet`] is a product of intervals, optionally intersected with the
//! set of points having at most `max_deviating` coordinates off a lattice
//! `lattice·ℤ`. Distances and diameters are exact infima/suprema over the
//! closure. The constrained case is split into the finitely many unions of
//! products obtained by choosing which coordinates are pinned to the lattice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
    #[serde(default = "yes")]
    pub lo_closed: bool,
    #[serde(default = "yes")]
    pub hi_closed: bool,
}

fn yes() -> bool {
    true
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        let iv = Interval { lo, hi, lo_closed, hi_closed };
        iv.check()?;
        Ok(iv)
    }

    pub fn closed(lo: Scalar, hi: Scalar) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: Scalar, hi: Scalar) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    pub fn point(x: Scalar) -> Self {
        Interval { lo: x, hi: x, lo_closed: true, hi_closed: true }
    }

    pub fn check(&self) -> Result<()> {
        if self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed)) {
            return Err(Error::Empty(format!("interval {self}")));
        }
        Ok(())
    }

    pub fn contains(&self, x: Scalar) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn length(&self) -> Scalar {
        self.hi - self.lo
    }

    /// Gap between closures.
    pub fn gap(&self, other: &Interval) -> Scalar {
        scalar::max(Scalar::ZERO, scalar::max(other.lo - self.hi, self.lo - other.hi))
    }

    pub fn translated(&self, by: Scalar) -> Interval {
        Interval { lo: self.lo + by, hi: self.hi + by, ..*self }
    }

    /// Open `eps`-enlargement; `eps = 0` returns the interval unchanged.
    pub fn fattened(&self, eps: Scalar) -> Interval {
        if eps.is_zero() {
            return self.clone();
        }
        Interval { lo: self.lo - eps, hi: self.hi + eps, lo_closed: false, hi_closed: false }
    }

    /// First and last multiples of `step` inside the interval.
    pub fn lattice_span(&self, step: Scalar) -> Option<(Scalar, Scalar)> {
        let mut first = self.lo.div_ceil(step);
        if !self.lo_closed && step.mul_int(first) == self.lo {
            first += 1;
        }
        let mut last = self.hi.div_floor(step);
        if !self.hi_closed && step.mul_int(last) == self.hi {
            last -= 1;
        }
        (first <= last).then(|| (step.mul_int(first), step.mul_int(last)))
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// "At most `max_deviating` coordinates outside `lattice·ℤ`".
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeviationConstraint {
    pub lattice: Scalar,
    pub max_deviating: usize,
}

impl DeviationConstraint {
    pub fn new(lattice: Scalar, max_deviating: usize) -> Result<Self> {
        if lattice.log2_exact().is_none() {
            return Err(Error::invalid(format!("lattice scale {lattice} is not a power of two")));
        }
        Ok(DeviationConstraint { lattice, max_deviating })
    }

    pub fn deviating_count(&self, coords: &[Scalar]) -> usize {
        coords.iter().filter(|x| !x.is_multiple_of(self.lattice)).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxSet {
    pub factors: Vec<Interval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<DeviationConstraint>,
}

/// Result of [`BoxSet::fatten`]: the enlarged box and whether a deviation
/// constraint had to be dropped (making the box a superset of the true
/// neighbourhood).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fattened {
    pub bx: BoxSet,
    pub over_approximate: bool,
}

/// One coordinate of one constrained case: either a whole interval or the
/// lattice points it contains.
#[derive(Clone, Copy, Debug)]
enum Factor {
    Span(Scalar, Scalar),
    Lattice { step: Scalar, first: Scalar, last: Scalar },
}

impl Factor {
    fn hull(self) -> (Scalar, Scalar) {
        match self {
            Factor::Span(a, b) => (a, b),
            Factor::Lattice { first, last, .. } => (first, last),
        }
    }

    fn gap(self, other: Factor) -> Scalar {
        use Factor::*;
        match (self, other) {
            (Span(a0, a1), Span(b0, b1)) => {
                scalar::max(Scalar::ZERO, scalar::max(b0 - a1, a0 - b1))
            }
            (Span(a0, a1), lat @ Lattice { .. }) | (lat @ Lattice { .. }, Span(a0, a1)) => {
                lattice_to_span(lat, a0, a1)
            }
            (Lattice { step: s1, first: f1, last: l1 }, Lattice { step: s2, first: f2, last: l2 }) => {
                // the coarser lattice is a sublattice of the finer one, so a
                // coarse point inside the fine hull is a fine point
                let (lo, hi, coarse) = if s1 <= s2 {
                    (f1, l1, Lattice { step: s2, first: f2, last: l2 })
                } else {
                    (f2, l2, Lattice { step: s1, first: f1, last: l1 })
                };
                lattice_to_span(coarse, lo, hi)
            }
        }
    }

    fn spread(self, other: Factor) -> Scalar {
        let (a0, a1) = self.hull();
        let (b0, b1) = other.hull();
        scalar::max(a1 - b0, b1 - a0)
    }
}

/// Gap between the points of a lattice factor and the span `[lo, hi]`.
fn lattice_to_span(lat: Factor, lo: Scalar, hi: Scalar) -> Scalar {
    let Factor::Lattice { step, first, last } = lat else { unreachable!() };
    let inside = scalar::max(first, step.mul_int(lo.div_ceil(step)));
    if inside <= hi && inside <= last {
        return Scalar::ZERO;
    }
    let mut best: Option<Scalar> = None;
    let below = scalar::min(last, step.mul_int(lo.div_floor(step)));
    if below >= first {
        best = Some(lo - below);
    }
    let above = scalar::max(first, step.mul_int(hi.div_ceil(step)));
    if above <= last {
        let d = above - hi;
        best = Some(best.map_or(d, |b| scalar::min(b, d)));
    }
    best.expect("nonempty lattice factor")
}

impl BoxSet {
    pub fn new(factors: Vec<Interval>, constraint: Option<DeviationConstraint>) -> Result<Self> {
        let bx = BoxSet { factors, constraint };
        bx.check()?;
        Ok(bx)
    }

    pub fn unconstrained(factors: Vec<Interval>) -> Result<Self> {
        Self::new(factors, None)
    }

    pub fn point(coords: &[Scalar]) -> Self {
        BoxSet { factors: coords.iter().map(|&x| Interval::point(x)).collect(), constraint: None }
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn check(&self) -> Result<()> {
        if self.factors.is_empty() {
            return Err(Error::invalid("box of dimension 0"));
        }
        for f in &self.factors {
            f.check()?;
        }
        if self.cases().is_empty() {
            return Err(Error::Empty("deviation constraint leaves no points".into()));
        }
        Ok(())
    }

    pub fn contains(&self, x: &[Scalar]) -> bool {
        x.len() == self.dim()
            && self.factors.iter().zip(x).all(|(f, &v)| f.contains(v))
            && self.constraint.as_ref().map_or(true, |c| c.deviating_count(x) <= c.max_deviating)
    }

    pub fn translated(&self, by: &[Scalar]) -> BoxSet {
        if let Some(c) = &self.constraint {
            debug_assert!(by.iter().all(|t| t.is_multiple_of(c.lattice)));
        }
        BoxSet {
            factors: self.factors.iter().zip(by).map(|(f, &t)| f.translated(t)).collect(),
            constraint: self.constraint.clone(),
        }
    }

    /// The products whose union is the box, one per choice of pinned
    /// coordinates. Unconstrained boxes yield a single case.
    fn cases(&self) -> Vec<Vec<Factor>> {
        let spans: Vec<Factor> = self.factors.iter().map(|f| Factor::Span(f.lo, f.hi)).collect();
        let Some(c) = &self.constraint else { return vec![spans] };
        let dim = self.dim();
        if c.max_deviating >= dim {
            return vec![spans];
        }
        let lattice: Vec<Option<Factor>> = self
            .factors
            .iter()
            .map(|f| {
                f.lattice_span(c.lattice)
                    .map(|(first, last)| Factor::Lattice { step: c.lattice, first, last })
            })
            .collect();
        let mut out = Vec::new();
        for pinned in combinations(dim, dim - c.max_deviating) {
            let mut case = spans.clone();
            let mut ok = true;
            for &j in &pinned {
                match lattice[j] {
                    Some(l) => case[j] = l,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                out.push(case);
            }
        }
        out
    }

    /// Exact `inf { d(x, y) : x ∈ self, y ∈ other }` over closures.
    pub fn distance(&self, other: &BoxSet) -> Result<Scalar> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let (ca, cb) = (self.cases(), other.cases());
        if ca.is_empty() || cb.is_empty() {
            return Err(Error::Empty("box distance operand".into()));
        }
        let mut best: Option<Scalar> = None;
        for a in &ca {
            for b in &cb {
                let d = a
                    .iter()
                    .zip(b)
                    .map(|(&fa, &fb)| fa.gap(fb))
                    .fold(Scalar::ZERO, scalar::max);
                best = Some(best.map_or(d, |x| scalar::min(x, d)));
            }
        }
        Ok(best.unwrap())
    }

    /// Exact `sup { d(x, y) : x, y ∈ self }`.
    pub fn diameter(&self) -> Result<Scalar> {
        let cases = self.cases();
        if cases.is_empty() {
            return Err(Error::Empty("box diameter operand".into()));
        }
        let mut best = Scalar::ZERO;
        for (i, a) in cases.iter().enumerate() {
            for b in &cases[i..] {
                let d = a
                    .iter()
                    .zip(b)
                    .map(|(&fa, &fb)| fa.spread(fb))
                    .fold(Scalar::ZERO, scalar::max);
                best = scalar::max(best, d);
            }
        }
        Ok(best)
    }

    /// Open `eps`-neighbourhood in the sup metric. A deviation constraint is
    /// dropped, which is reported through `over_approximate`.
    pub fn fatten(&self, eps: Scalar) -> Result<Fattened> {
        if eps.is_negative() {
            return Err(Error::invalid(format!("negative fattening radius {eps}")));
        }
        if eps.is_zero() {
            return Ok(Fattened { bx: self.clone(), over_approximate: false });
        }
        Ok(Fattened {
            bx: BoxSet {
                factors: self.factors.iter().map(|f| f.fattened(eps)).collect(),
                constraint: None,
            },
            over_approximate: self.constraint.is_some(),
        })
    }

    /// Distance from `x` (assumed inside the box) to the complement of the
    /// enclosing product in `ℝ^dim`.
    pub fn inradius_at(&self, x: &[Scalar]) -> Scalar {
        self.factors
            .iter()
            .zip(x)
            .map(|(f, &v)| scalar::min(v - f.lo, f.hi - v))
            .fold(None, |acc: Option<Scalar>, d| Some(acc.map_or(d, |a| scalar::min(a, d))))
            .unwrap_or(Scalar::ZERO)
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    fn iv(lo: i64, hi: i64) -> Interval {
        Interval::closed(lo.into(), hi.into()).unwrap()
    }

    fn ov(lo: i64, hi: i64) -> Interval {
        Interval::open(lo.into(), hi.into()).unwrap()
    }

    #[test]
    fn empty_intervals_rejected() {
        assert!(Interval::open(Scalar::ONE, Scalar::ONE).is_err());
        assert!(Interval::closed(Scalar::ONE, Scalar::ZERO).is_err());
        assert!(Interval::closed(Scalar::ONE, Scalar::ONE).is_ok());
    }

    #[test]
    fn single_axis_gap() {
        let a = BoxSet::unconstrained(vec![iv(0, 2), iv(0, 2)]).unwrap();
        let b = BoxSet::unconstrained(vec![iv(5, 6), iv(0, 2)]).unwrap();
        assert_eq!(a.distance(&b).unwrap(), Scalar::int(3));
        assert_eq!(a.distance(&a).unwrap(), Scalar::ZERO);
    }

    #[test]
    fn diameters() {
        assert_eq!(BoxSet::point(&[s("1/2"), s("3")]).diameter().unwrap(), Scalar::ZERO);
        let c = BoxSet::unconstrained(vec![ov(0, 16), ov(0, 16)]).unwrap();
        assert_eq!(c.diameter().unwrap(), Scalar::int(16));
    }

    #[test]
    fn constrained_cross_has_axis_diameter() {
        // (-4,4)^2 with at most one coordinate off 16ℤ: the axis cross
        let c = DeviationConstraint::new(Scalar::int(16), 1).unwrap();
        let b = BoxSet::new(vec![ov(-4, 4), ov(-4, 4)], Some(c)).unwrap();
        assert_eq!(b.diameter().unwrap(), Scalar::int(8));
        assert!(b.contains(&[s("3"), s("0")]));
        assert!(!b.contains(&[s("3"), s("1")]));
    }

    #[test]
    fn constrained_slabs_touch_at_the_slab_start() {
        // [4,12]x{0} and {0}x[4,12] are at sup distance exactly 4
        let c = DeviationConstraint::new(Scalar::int(16), 1).unwrap();
        let a = BoxSet::new(vec![iv(4, 12), ov(-4, 4)], Some(c.clone())).unwrap();
        let b = BoxSet::new(vec![ov(-4, 4), iv(4, 12)], Some(c)).unwrap();
        assert_eq!(a.distance(&b).unwrap(), Scalar::int(4));
        let (ua, ub) = (
            BoxSet::unconstrained(a.factors.clone()).unwrap(),
            BoxSet::unconstrained(b.factors.clone()).unwrap(),
        );
        assert_eq!(ua.distance(&ub).unwrap(), Scalar::ZERO);
    }

    #[test]
    fn fatten_open_enlargement() {
        let b = BoxSet::unconstrained(vec![iv(0, 1)]).unwrap();
        let f = b.fatten(Scalar::int(2)).unwrap();
        assert_eq!(f.bx.factors[0], ov(-2, 3));
        assert!(!f.over_approximate);
        assert_eq!(b.fatten(Scalar::ZERO).unwrap().bx, b);
        assert!(b.fatten(Scalar::int(-1)).is_err());
        let c = DeviationConstraint::new(Scalar::int(4), 0).unwrap();
        let cb = BoxSet::new(vec![iv(0, 4)], Some(c)).unwrap();
        assert!(cb.fatten(Scalar::ONE).unwrap().over_approximate);
    }

    #[test]
    fn empty_constrained_box_rejected() {
        let c = DeviationConstraint::new(Scalar::int(16), 0).unwrap();
        assert!(BoxSet::new(vec![iv(1, 3)], Some(c)).is_err());
    }

    #[test]
    fn lattice_span_respects_open_ends() {
        assert_eq!(ov(0, 8).lattice_span(Scalar::int(4)), Some((Scalar::int(4), Scalar::int(4))));
        assert_eq!(iv(0, 8).lattice_span(Scalar::int(4)), Some((Scalar::ZERO, Scalar::int(8))));
        assert_eq!(ov(0, 4).lattice_span(Scalar::int(4)), None);
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }
}
