use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{BoxSet, Interval, TaggedPoint};
use crate::scalar::Scalar;
use crate::spaces::SpaceSpec;

/// Where a family comes from, for certificates and plots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Lattice cover of a deviating-lattice space.
    Lattice,
    /// Singletons on the tail blocks of an asymptotic union.
    Tail,
    /// Brick decomposition of a finite-dimensional part.
    FiniteDim,
    /// Placeholder for a family whose existence is assumed, not built.
    Assumed,
}

/// Prototypes living in one block of the target, repeated with `period`
/// (0 on an axis means no repetition along it).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyPart {
    #[serde(default)]
    pub path: Vec<usize>,
    pub prototypes: Vec<BoxSet>,
    pub period: Vec<Scalar>,
}

/// A family of sets given as translates of finitely many prototypes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicFamily {
    pub label: String,
    pub provenance: Provenance,
    pub parts: Vec<FamilyPart>,
    /// Diameter bound this family is built to satisfy.
    pub claimed_bound: Scalar,
    /// True when a fattening dropped a deviation constraint, so blocks are
    /// supersets of the exact neighbourhoods.
    #[serde(default)]
    pub over_approximate: bool,
}

/// One instantiated block: prototype `prototype` of part `part`, shifted by
/// `shift[c]·period[c]` on each axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockRef {
    pub part: usize,
    pub prototype: usize,
    pub shift: Vec<i128>,
}

/// An ordered list of families with the claims they are built to satisfy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverBundle {
    pub families: Vec<PeriodicFamily>,
    pub claimed_disjointness: Scalar,
    pub claimed_bound: Scalar,
    pub target: SpaceSpec,
    /// Set when some families are assumed rather than constructed.
    #[serde(default)]
    pub partial: bool,
    /// Radius by which the blocks were fattened from a cover; a lower bound
    /// for the Lebesgue number.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fattened_by: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl FamilyPart {
    pub fn new(path: Vec<usize>, prototypes: Vec<BoxSet>, period: Vec<Scalar>) -> Result<Self> {
        let part = FamilyPart { path, prototypes, period };
        part.check()?;
        Ok(part)
    }

    pub fn dim(&self) -> usize {
        self.period.len()
    }

    pub fn check(&self) -> Result<()> {
        for p in &self.prototypes {
            p.check()?;
            if p.dim() != self.dim() {
                return Err(Error::DimensionMismatch { expected: self.dim(), got: p.dim() });
            }
        }
        if self.period.iter().any(|p| p.is_negative()) {
            return Err(Error::invalid("negative period"));
        }
        Ok(())
    }

    pub fn offset(&self, shift: &[i128]) -> Vec<Scalar> {
        self.period.iter().zip(shift).map(|(p, &k)| p.mul_int(k)).collect()
    }

    pub fn block(&self, prototype: usize, shift: &[i128]) -> BoxSet {
        self.prototypes[prototype].translated(&self.offset(shift))
    }

    /// Shifts `k` on axis `c` with `proto_c + k·period_c` containing `x`.
    fn shifts_containing(&self, iv: &Interval, c: usize, x: Scalar) -> Option<(i128, i128)> {
        let p = self.period[c];
        if p.is_zero() {
            return iv.contains(x).then_some((0, 0));
        }
        // x − k·p ∈ [lo, hi]  ⇔  (x − hi)/p ≤ k ≤ (x − lo)/p
        let a = (x - iv.hi).div_ceil(p);
        let b = (x - iv.lo).div_floor(p);
        (a <= b).then_some((a, b))
    }

    /// Blocks of this part containing `coords`.
    pub fn blocks_containing(&self, coords: &[Scalar]) -> Vec<(usize, Vec<i128>)> {
        let mut out = Vec::new();
        if coords.len() != self.dim() {
            return out;
        }
        'proto: for (pi, proto) in self.prototypes.iter().enumerate() {
            let mut ranges = Vec::with_capacity(self.dim());
            for (c, iv) in proto.factors.iter().enumerate() {
                match self.shifts_containing(iv, c, coords[c]) {
                    Some(r) => ranges.push(r),
                    None => continue 'proto,
                }
            }
            for shift in shift_product(&ranges) {
                let moved: Vec<Scalar> =
                    coords.iter().zip(self.offset(&shift)).map(|(&x, o)| x - o).collect();
                if proto.contains(&moved) {
                    out.push((pi, shift));
                }
            }
        }
        out
    }

    /// Shifts of prototype `pi` whose block meets the closed window, widened
    /// by `margin` periods on each side.
    pub fn shifts_meeting(&self, pi: usize, window: &[Interval], margin: i128) -> Vec<Vec<i128>> {
        let proto = &self.prototypes[pi];
        let mut ranges = Vec::with_capacity(self.dim());
        for c in 0..self.dim() {
            let p = self.period[c];
            let (f, w) = (&proto.factors[c], &window[c]);
            if p.is_zero() {
                if f.hi < w.lo || f.lo > w.hi {
                    return Vec::new();
                }
                ranges.push((0, 0));
            } else {
                // f + k·p meets w  ⇔  (w.lo − f.hi)/p ≤ k ≤ (w.hi − f.lo)/p
                let a = (w.lo - f.hi).div_ceil(p) - margin;
                let b = (w.hi - f.lo).div_floor(p) + margin;
                if a > b {
                    return Vec::new();
                }
                ranges.push((a, b));
            }
        }
        shift_product(&ranges)
    }

    /// Number of shifts [`Self::shifts_meeting`] would return, saturating.
    pub fn count_meeting(&self, pi: usize, window: &[Interval], margin: i128) -> u128 {
        let proto = &self.prototypes[pi];
        let mut total = 1u128;
        for c in 0..self.dim() {
            let p = self.period[c];
            let (f, w) = (&proto.factors[c], &window[c]);
            let n = if p.is_zero() {
                u128::from(!(f.hi < w.lo || f.lo > w.hi))
            } else {
                let a = (w.lo - f.hi).div_ceil(p) - margin;
                let b = (w.hi - f.lo).div_floor(p) + margin;
                if a > b { 0 } else { (b - a + 1) as u128 }
            };
            total = total.saturating_mul(n);
        }
        total
    }

    /// Restriction to the slice where every axis not in `free` is fixed to
    /// the given value. Prototypes missing the slice are dropped; a deviation
    /// constraint loses the budget used up by the fixed coordinates.
    pub fn restrict(&self, free: &[usize], fixed: &[(usize, Scalar)]) -> FamilyPart {
        let mut protos = Vec::new();
        for proto in &self.prototypes {
            let mut ok = true;
            let mut fixed_ranges = Vec::new();
            for &(c, x) in fixed {
                match self.shifts_containing(&proto.factors[c], c, x) {
                    Some(r) => fixed_ranges.push((c, x, r)),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            // a fixed coordinate may be hit by several shifts; each yields a
            // separate translate in the slice
            let fixed_choices: Vec<(i128, i128)> = fixed_ranges.iter().map(|t| t.2).collect();
            for fshift in shift_product(&fixed_choices) {
                let mut constraint = proto.constraint.clone();
                if let Some(con) = &mut constraint {
                    let used = fixed_ranges
                        .iter()
                        .zip(&fshift)
                        .filter(|((c, x, _), &k)| !(*x - self.period[*c].mul_int(k)).is_multiple_of(con.lattice))
                        .count();
                    if used > con.max_deviating {
                        continue;
                    }
                    con.max_deviating -= used;
                }
                let factors = free.iter().map(|&c| proto.factors[c].clone()).collect();
                protos.push(BoxSet { factors, constraint });
            }
        }
        FamilyPart {
            path: self.path.clone(),
            prototypes: protos,
            period: free.iter().map(|&c| self.period[c]).collect(),
        }
    }
}

/// All integer vectors in the product of inclusive ranges.
pub(crate) fn shift_product(ranges: &[(i128, i128)]) -> Vec<Vec<i128>> {
    let mut out = vec![Vec::with_capacity(ranges.len())];
    for &(a, b) in ranges {
        let mut next = Vec::with_capacity(out.len() * (b - a + 1).max(0) as usize);
        for v in &out {
            for k in a..=b {
                let mut w = v.clone();
                w.push(k);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

impl PeriodicFamily {
    /// A family on a plain space with a single part.
    pub fn plain(label: impl Into<String>, prototypes: Vec<BoxSet>, period: Vec<Scalar>, bound: Scalar) -> Result<Self> {
        Ok(PeriodicFamily {
            label: label.into(),
            provenance: Provenance::Lattice,
            parts: vec![FamilyPart::new(Vec::new(), prototypes, period)?],
            claimed_bound: bound,
            over_approximate: false,
        })
    }

    /// A placeholder whose blocks are not materialised.
    pub fn assumed(label: impl Into<String>, bound: Scalar) -> Self {
        PeriodicFamily {
            label: label.into(),
            provenance: Provenance::Assumed,
            parts: Vec::new(),
            claimed_bound: bound,
            over_approximate: false,
        }
    }

    pub fn is_assumed(&self) -> bool {
        self.provenance == Provenance::Assumed
    }

    pub fn prototype_count(&self) -> usize {
        self.parts.iter().map(|p| p.prototypes.len()).sum()
    }

    pub fn block(&self, b: &BlockRef) -> BoxSet {
        self.parts[b.part].block(b.prototype, &b.shift)
    }

    /// Blocks containing the point.
    pub fn blocks_containing(&self, x: &TaggedPoint) -> Vec<BlockRef> {
        let mut out = Vec::new();
        for (pi, part) in self.parts.iter().enumerate() {
            if part.path != x.path {
                continue;
            }
            for (proto, shift) in part.blocks_containing(&x.coords) {
                out.push(BlockRef { part: pi, prototype: proto, shift });
            }
        }
        out
    }

    /// Open `eps`-neighbourhood of every block.
    pub fn fattened(&self, eps: Scalar, label: impl Into<String>) -> Result<PeriodicFamily> {
        let mut over = self.over_approximate;
        let mut parts = Vec::with_capacity(self.parts.len());
        for part in &self.parts {
            let mut protos = Vec::with_capacity(part.prototypes.len());
            for p in &part.prototypes {
                let f = p.fatten(eps)?;
                over |= f.over_approximate;
                protos.push(f.bx);
            }
            parts.push(FamilyPart { path: part.path.clone(), prototypes: protos, period: part.period.clone() });
        }
        Ok(PeriodicFamily {
            label: label.into(),
            provenance: self.provenance,
            parts,
            claimed_bound: self.claimed_bound + eps + eps,
            over_approximate: over,
        })
    }

    /// Restriction of a single-part plain family to a coordinate slice.
    pub fn restrict(&self, free: &[usize], fixed: &[(usize, Scalar)]) -> PeriodicFamily {
        PeriodicFamily {
            label: self.label.clone(),
            provenance: self.provenance,
            parts: self.parts.iter().map(|p| p.restrict(free, fixed)).collect(),
            claimed_bound: self.claimed_bound,
            over_approximate: self.over_approximate,
        }
    }
}

impl CoverBundle {
    pub fn family_count(&self) -> usize {
        self.families.len()
    }

    /// Every block replaced by its open `eps`-neighbourhood. Assumed
    /// families only have their bound adjusted.
    pub fn fattened(&self, eps: Scalar) -> Result<CoverBundle> {
        let mut families = Vec::with_capacity(self.families.len());
        for f in &self.families {
            if f.is_assumed() {
                let mut g = f.clone();
                g.claimed_bound = g.claimed_bound + eps + eps;
                families.push(g);
            } else {
                families.push(f.fattened(eps, format!("N_{eps}({})", f.label))?);
            }
        }
        let two = eps + eps;
        let disjointness = if self.claimed_disjointness > two { self.claimed_disjointness - two } else { Scalar::ZERO };
        Ok(CoverBundle {
            families,
            claimed_disjointness: disjointness,
            claimed_bound: self.claimed_bound + two,
            target: self.target.clone(),
            partial: self.partial,
            fattened_by: Some(self.fattened_by.unwrap_or(Scalar::ZERO) + eps),
            notes: self.notes.clone(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
