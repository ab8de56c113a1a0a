use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cover::{BlockRef, CoverBundle, FamilyPart, PeriodicFamily};
use crate::error::{Error, Result};
use crate::metric::{path_offset, BoxSet, Interval, TaggedPoint};
use crate::scalar::Scalar;
use crate::spaces::{SpaceKind, SpaceSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum DisjointCheck {
    Ok { pairs_checked: u64 },
    Violation { a: BlockRef, b: BlockRef, distance: Scalar },
}

impl DisjointCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, DisjointCheck::Ok { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum BoundedCheck {
    Ok { max_diameter: Scalar },
    Violation { part: usize, prototype: usize, diameter: Scalar },
    /// The family is a placeholder; nothing to measure.
    Assumed,
}

impl BoundedCheck {
    pub fn is_ok(&self) -> bool {
        !matches!(self, BoundedCheck::Violation { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CoverageMode {
    Exhaustive,
    Sampled { n: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum CoverageCheck {
    Ok { points_checked: u64 },
    Uncovered { point: TaggedPoint },
}

impl CoverageCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, CoverageCheck::Ok { .. })
    }
}

/// Closest pair of distinct blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosestPair {
    pub a: BlockRef,
    pub b: BlockRef,
    pub distance: Scalar,
}

struct Scan {
    best: Option<ClosestPair>,
    pairs: u64,
    budget: u128,
    guard: u128,
}

impl Scan {
    fn offer(&mut self, a: BlockRef, b: BlockRef, d: Scalar, radius: Scalar) {
        self.pairs += 1;
        if d <= radius && self.best.as_ref().is_none_or(|c| d < c.distance) {
            self.best = Some(ClosestPair { a, b, distance: d });
        }
    }

    fn spend(&mut self, n: u128) -> Result<()> {
        self.budget = self.budget.saturating_add(n);
        if self.budget > self.guard {
            return Err(Error::GuardExceeded { what: "pair enumeration".into(), estimate: self.budget, limit: self.guard });
        }
        Ok(())
    }
}

/// Per-axis shifts `k` for which `q + k·period` can come within `radius` of
/// `p`; `None` when no shift can.
fn close_shifts(p: &Interval, q: &Interval, period: Scalar, radius: Scalar) -> Option<(i128, i128)> {
    if period.is_zero() {
        return (p.gap(q) <= radius).then_some((0, 0));
    }
    let a = (p.lo - radius - q.hi).div_ceil(period);
    let b = (p.hi + radius - q.lo).div_floor(period);
    (a <= b).then_some((a, b))
}

fn scan_part(part: &FamilyPart, pi: usize, radius: Scalar, scan: &mut Scan) -> Result<()> {
    let n = part.prototypes.len();
    for a in 0..n {
        for b in a..n {
            let (pa, pb) = (&part.prototypes[a], &part.prototypes[b]);
            let mut ranges = Vec::with_capacity(part.dim());
            let mut count = 1u128;
            let mut far = false;
            for c in 0..part.dim() {
                match close_shifts(&pa.factors[c], &pb.factors[c], part.period[c], radius) {
                    Some(r) => {
                        count = count.saturating_mul((r.1 - r.0 + 1) as u128);
                        ranges.push(r);
                    }
                    None => {
                        far = true;
                        break;
                    }
                }
            }
            if far {
                continue;
            }
            scan.spend(count)?;
            for shift in crate::cover::shift_product(&ranges) {
                if a == b {
                    // each unordered pair once; the zero shift is the block itself
                    match shift.iter().find(|&&k| k != 0) {
                        None => continue,
                        Some(&k) if k < 0 => continue,
                        _ => {}
                    }
                }
                let moved = pb.translated(&part.offset(&shift));
                let d = pa.distance(&moved)?;
                let zero = vec![0; part.dim()];
                scan.offer(
                    BlockRef { part: pi, prototype: a, shift: zero },
                    BlockRef { part: pi, prototype: b, shift },
                    d,
                    radius,
                );
            }
        }
    }
    Ok(())
}

/// Distance between boxes of possibly different dimension, padding the
/// shorter one with the point 0.
pub fn padded_box_distance(x: &BoxSet, y: &BoxSet) -> Result<Scalar> {
    let n = x.dim().max(y.dim());
    let pad = |b: &BoxSet| {
        let mut f = b.factors.clone();
        f.resize(n, Interval::point(Scalar::ZERO));
        BoxSet { factors: f, constraint: b.constraint.clone() }
    };
    pad(x).distance(&pad(y))
}

fn instances(part: &FamilyPart, window: Option<&SpaceSpec>, scan: &mut Scan) -> Result<Vec<(usize, Vec<i128>)>> {
    if part.period.iter().all(|p| p.is_zero()) {
        return Ok((0..part.prototypes.len()).map(|i| (i, vec![0; part.dim()])).collect());
    }
    let w = window
        .ok_or_else(|| Error::invalid("periodic parts in different blocks need a window"))?
        .block_at(&part.path)?;
    let mut out = Vec::new();
    for pi in 0..part.prototypes.len() {
        scan.spend(part.count_meeting(pi, &w.window, 1))?;
        out.extend(part.shifts_meeting(pi, &w.window, 1).into_iter().map(|s| (pi, s)));
    }
    Ok(out)
}

fn scan_family(f: &PeriodicFamily, radius: Scalar, window: Option<&SpaceSpec>, guard: u128) -> Result<Scan> {
    let mut scan = Scan { best: None, pairs: 0, budget: 0, guard };
    for (pi, part) in f.parts.iter().enumerate() {
        scan_part(part, pi, radius, &mut scan)?;
    }
    for a in 0..f.parts.len() {
        for b in a + 1..f.parts.len() {
            let (pa, pb) = (&f.parts[a], &f.parts[b]);
            let offset = path_offset(&pa.path, &pb.path)?;
            if offset > radius {
                continue;
            }
            let ia = instances(pa, window, &mut scan)?;
            let ib = instances(pb, window, &mut scan)?;
            scan.spend((ia.len() as u128).saturating_mul(ib.len() as u128))?;
            for (x, sx) in &ia {
                let bx = pa.block(*x, sx);
                for (y, sy) in &ib {
                    let d = offset + padded_box_distance(&bx, &pb.block(*y, sy))?;
                    scan.offer(
                        BlockRef { part: a, prototype: *x, shift: sx.clone() },
                        BlockRef { part: b, prototype: *y, shift: sy.clone() },
                        d,
                        radius,
                    );
                }
            }
        }
    }
    Ok(scan)
}

/// The closest pair of distinct blocks among those at distance `≤ radius`.
///
/// Same-block pairs are reduced modulo the period, so the answer holds for
/// the whole infinite family. Parts in different blocks of a union are
/// instantiated on `window` (plus one period) when they are periodic.
pub fn closest_pair(f: &PeriodicFamily, radius: Scalar, window: Option<&SpaceSpec>, guard: u128) -> Result<Option<ClosestPair>> {
    Ok(scan_family(f, radius, window, guard)?.best)
}

/// Checks `d(U, V) > r` for all distinct blocks.
pub fn validate_disjoint(f: &PeriodicFamily, r: Scalar, window: Option<&SpaceSpec>, guard: u128) -> Result<DisjointCheck> {
    let scan = scan_family(f, r, window, guard)?;
    Ok(match scan.best {
        Some(c) => DisjointCheck::Violation { a: c.a, b: c.b, distance: c.distance },
        None => DisjointCheck::Ok { pairs_checked: scan.pairs },
    })
}

/// Checks `diam U ≤ bound` for every prototype.
pub fn validate_bounded(f: &PeriodicFamily, bound: Scalar) -> Result<BoundedCheck> {
    if f.is_assumed() {
        return Ok(BoundedCheck::Assumed);
    }
    let mut max = Scalar::ZERO;
    for (pi, part) in f.parts.iter().enumerate() {
        for (qi, p) in part.prototypes.iter().enumerate() {
            let d = p.diameter()?;
            if d > bound {
                return Ok(BoundedCheck::Violation { part: pi, prototype: qi, diameter: d });
            }
            max = crate::scalar::max(max, d);
        }
    }
    Ok(BoundedCheck::Ok { max_diameter: max })
}

/// Number of blocks (over all families) containing `x`.
pub fn point_depth(bundle: &CoverBundle, x: &TaggedPoint) -> usize {
    bundle.families.iter().map(|f| f.blocks_containing(x).len()).sum()
}

pub fn is_covered(bundle: &CoverBundle, x: &TaggedPoint) -> bool {
    bundle.families.iter().any(|f| !f.blocks_containing(x).is_empty())
}

/// Checks that every tested window point of the target lies in some block.
pub fn validate_coverage(bundle: &CoverBundle, mode: CoverageMode, guard: u128) -> Result<CoverageCheck> {
    let mut checked = 0u64;
    match mode {
        CoverageMode::Exhaustive => {
            for x in bundle.target.enumerate_window(guard)? {
                if !is_covered(bundle, &x) {
                    return Ok(CoverageCheck::Uncovered { point: x });
                }
                checked += 1;
            }
        }
        CoverageMode::Sampled { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..n {
                let x = sample_window_point(&bundle.target, &mut rng)?;
                if !is_covered(bundle, &x) {
                    return Ok(CoverageCheck::Uncovered { point: x });
                }
                checked += 1;
            }
        }
    }
    Ok(CoverageCheck::Ok { points_checked: checked })
}

/// A window point of the space, uniform when every axis carries the same
/// candidate values.
pub fn sample_window_point(spec: &SpaceSpec, rng: &mut impl Rng) -> Result<TaggedPoint> {
    match &spec.kind {
        SpaceKind::AsUnion { start, blocks } => {
            let weights: Vec<f64> = blocks.iter().map(|b| b.window_cardinality() as f64).collect();
            let dist = WeightedIndex::new(&weights).map_err(|_| Error::Empty("window of the union".into()))?;
            let j = dist.sample(rng);
            let mut p = sample_window_point(&blocks[j], rng)?;
            p.path.insert(0, start + j);
            Ok(p)
        }
        SpaceKind::LatticePower { .. } => {
            let vals = spec.axis_values();
            let mut coords = Vec::with_capacity(vals.len());
            for (on, _) in &vals {
                if on.is_empty() {
                    return Err(Error::Empty("window".into()));
                }
                coords.push(on[rng.gen_range(0..on.len())]);
            }
            Ok(TaggedPoint::plain(coords))
        }
        SpaceKind::DeviatingLattice { dim, max_deviating, .. } => {
            let vals = spec.axis_values();
            let dim = *dim;
            let uniform_axes = vals.windows(2).all(|w| w[0] == w[1]);
            let (on_n, off_n) = (vals[0].0.len() as f64, vals[0].1.len() as f64);
            if uniform_axes {
                let top = (*max_deviating).min(dim);
                let weights: Vec<f64> = (0..=top)
                    .map(|j| combinations_count(dim, j) * off_n.powi(j as i32) * on_n.powi((dim - j) as i32))
                    .collect();
                let dist = WeightedIndex::new(&weights).map_err(|_| Error::Empty("window".into()))?;
                let j = dist.sample(rng);
                let dev = sample(rng, dim, j).into_vec();
                let coords = (0..dim)
                    .map(|c| {
                        let list = if dev.contains(&c) { &vals[c].1 } else { &vals[c].0 };
                        list[rng.gen_range(0..list.len())]
                    })
                    .collect();
                return Ok(TaggedPoint::plain(coords));
            }
            for _ in 0..100_000 {
                let coords: Vec<Scalar> = vals
                    .iter()
                    .map(|(on, off)| {
                        let k = rng.gen_range(0..on.len() + off.len());
                        if k < on.len() { on[k] } else { off[k - on.len()] }
                    })
                    .collect();
                let p = TaggedPoint::plain(coords);
                if spec.contains(&p)? {
                    return Ok(p);
                }
            }
            Err(Error::Empty("rejection sampling found no window point".into()))
        }
    }
}

fn combinations_count(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}
