use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::{CellSet, Grid};

/// Three-way split of a carrier by an `ε`-partition between the faces
/// `x_axis = 0` (side A) and `x_axis = side` (side B).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionResult {
    pub l: CellSet,
    pub side_a: CellSet,
    pub side_b: CellSet,
    pub axis: usize,
    pub epsilon: Scalar,
}

/// Outcome of checking the four invariants of a [`PartitionResult`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionInvariants {
    pub partitions_carrier: bool,
    pub sides_contain_faces: bool,
    pub far_from_faces: bool,
    pub sides_not_adjacent: bool,
}

impl PartitionInvariants {
    pub fn all(&self) -> bool {
        self.partitions_carrier && self.sides_contain_faces && self.far_from_faces && self.sides_not_adjacent
    }
}

/// Grid points with coordinate `index` on `axis`.
pub fn face(grid: &Grid, axis: usize, index: usize) -> CellSet {
    CellSet::from_indices(grid, (0..grid.len()).filter(|&i| grid.multi_index(i)[axis] == index))
}

/// Points whose distance to `set` satisfies `keep(num)` where `num` is the
/// distance in grid steps.
fn by_distance(set: &CellSet, keep: impl Fn(u32) -> bool) -> CellSet {
    let dt = set.distance_transform();
    CellSet::from_indices(set.grid(), dt.iter().enumerate().filter(|(_, &d)| d != u32::MAX && keep(d)).map(|(i, _)| i))
}

/// `N_{ε·num/den}(set)` (open) on the grid.
fn open_nbhd(set: &CellSet, eps: Scalar, num: i128, den: i128) -> CellSet {
    let delta = set.grid().delta;
    // d·δ < ε·num/den  ⇔  den·d·δ < num·ε
    by_distance(set, |d| delta.mul_int(d as i128 * den) < eps.mul_int(num))
}

/// Index-space bounding box of a nonempty grid set.
fn index_box(set: &CellSet) -> Option<(Vec<usize>, Vec<usize>)> {
    let g = set.grid();
    let mut it = set.iter();
    let first = g.multi_index(it.next()?);
    let (mut lo, mut hi) = (first.clone(), first);
    for i in it {
        for (a, v) in g.multi_index(i).into_iter().enumerate() {
            lo[a] = lo[a].min(v);
            hi[a] = hi[a].max(v);
        }
    }
    Some((lo, hi))
}

/// Grid distance in steps between two small sets, by brute force.
fn brute_distance(a: &CellSet, b: &CellSet) -> u64 {
    let g = a.grid();
    let pb: Vec<Vec<usize>> = b.iter().map(|j| g.multi_index(j)).collect();
    let mut best = u64::MAX;
    for i in a.iter() {
        let x = g.multi_index(i);
        for y in &pb {
            let d = x.iter().zip(y).map(|(&u, &v)| u.abs_diff(v)).max().unwrap_or(0) as u64;
            best = best.min(d);
        }
    }
    best
}

fn check_family(carrier: &CellSet, family: &[CellSet], epsilon: Scalar, b: Scalar) -> Result<()> {
    let grid = carrier.grid();
    let delta = grid.delta;
    let mut boxes = Vec::with_capacity(family.len());
    for (i, u) in family.iter().enumerate() {
        if u.grid() != grid {
            return Err(Error::invalid("family block on a different grid"));
        }
        let Some((lo, hi)) = index_box(u) else { continue };
        // the sup-metric diameter of a grid set is its widest extent
        let steps = lo.iter().zip(&hi).map(|(l, h)| h - l).max().unwrap_or(0);
        let d = delta.mul_int(steps as i128);
        if d.mul_int(3) > b {
            return Err(Error::hypothesis(format!("block {i} has diameter {d} > B/3 = {b}/3")));
        }
        boxes.push((i, lo, hi));
    }
    // a pair can be within ε only if its boxes are
    let reach = epsilon.div_floor(delta) as usize;
    boxes.sort_by_key(|(_, lo, _)| lo[0]);
    for x in 0..boxes.len() {
        let (i, lo_i, hi_i) = &boxes[x];
        for (j, lo_j, hi_j) in &boxes[x + 1..] {
            if lo_j[0] > hi_i[0] + reach {
                break;
            }
            let near = lo_i.iter().zip(hi_i).zip(lo_j.iter().zip(hi_j)).all(|((&l1, &h1), (&l2, &h2))| {
                l2 <= h1 + reach && l1 <= h2 + reach
            });
            if !near {
                continue;
            }
            let (u, v) = (&family[*i], &family[*j]);
            let d = if u.count().saturating_mul(v.count()) <= 1 << 16 {
                delta.mul_int(brute_distance(u, v) as i128)
            } else {
                u.distance_to(v).expect("both nonempty")
            };
            if d <= epsilon {
                let (a, b) = ((*i).min(*j), (*i).max(*j));
                return Err(Error::hypothesis(format!("blocks {a} and {b} are at distance {d} <= epsilon = {epsilon}")));
            }
        }
    }
    Ok(())
}

/// The `ε`-partition of `carrier ⊆ [0, B]^d` between the faces of `axis`
/// built from an `ε`-disjoint, `B/3`-bounded family:
///
/// * blocks within `2ε` of the upper face go to side B, the rest to side A,
///   each fattened by `ε/3`;
/// * collars `N_{4ε/3}` of the two faces join their sides;
/// * everything else in the carrier is `L`.
pub fn epsilon_partition(carrier: &CellSet, family: &[CellSet], axis: usize, epsilon: Scalar, b: Scalar) -> Result<PartitionResult> {
    let grid = carrier.grid();
    if axis >= grid.dim {
        return Err(Error::invalid(format!("axis {axis} out of range for dimension {}", grid.dim)));
    }
    if grid.side() != b {
        return Err(Error::invalid(format!("carrier grid has side {}, expected B = {b}", grid.side())));
    }
    if !epsilon.is_positive() || epsilon.mul_int(6) >= b {
        return Err(Error::hypothesis(format!("need 0 < epsilon < B/6, got epsilon = {epsilon}, B = {b}")));
    }
    check_family(carrier, family, epsilon, b)?;
    let f_minus = face(grid, axis, 0);
    let f_plus = face(grid, axis, grid.n - 1);
    let near_plus = by_distance(&f_plus, |d| grid.delta.mul_int(d as i128) <= epsilon + epsilon);

    // fattening distributes over unions, so each side is fattened once
    let mut plus_blocks = CellSet::empty(grid);
    let mut minus_blocks = CellSet::empty(grid);
    for u in family.iter().filter(|u| !u.is_empty()) {
        if u.intersects(&near_plus) {
            plus_blocks = plus_blocks.union(u);
        } else {
            minus_blocks = minus_blocks.union(u);
        }
    }
    let to_b = open_nbhd(&f_plus, epsilon, 4, 3).union(&open_nbhd(&plus_blocks, epsilon, 1, 3));
    let to_a = open_nbhd(&f_minus, epsilon, 4, 3).union(&open_nbhd(&minus_blocks, epsilon, 1, 3));
    if to_a.intersects(&to_b) {
        return Err(Error::hypothesis("the two sides overlap; the cube is too small for this family"));
    }
    let side_a = carrier.intersection(&to_a);
    let side_b = carrier.intersection(&to_b);
    let l = carrier.difference(&to_a).difference(&to_b);
    Ok(PartitionResult { l, side_a, side_b, axis, epsilon })
}

impl PartitionResult {
    /// Checks the invariants against the carrier that produced the result.
    pub fn invariants(&self, carrier: &CellSet) -> PartitionInvariants {
        let grid = carrier.grid();
        let union = self.l.union(&self.side_a).union(&self.side_b);
        let disjoint = !self.l.intersects(&self.side_a)
            && !self.l.intersects(&self.side_b)
            && !self.side_a.intersects(&self.side_b);
        let f_minus = face(grid, self.axis, 0).intersection(carrier);
        let f_plus = face(grid, self.axis, grid.n - 1).intersection(carrier);
        let far = |f: &CellSet| self.l.distance_to(f).is_none_or(|d| d > self.epsilon);
        PartitionInvariants {
            partitions_carrier: disjoint && union == *carrier,
            sides_contain_faces: f_minus.is_subset(&self.side_a) && f_plus.is_subset(&self.side_b),
            far_from_faces: far(&f_minus) && far(&f_plus),
            sides_not_adjacent: self.side_a.distance_to(&self.side_b).is_none_or(|d| d > grid.delta),
        }
    }
}

/// `true` iff the last set of a decreasing chain is nonempty.
pub fn check_nested(chain: &[CellSet]) -> Result<bool> {
    for w in chain.windows(2) {
        if !w[1].is_subset(&w[0]) {
            return Err(Error::invalid("chain is not decreasing"));
        }
    }
    chain.last().map(|l| !l.is_empty()).ok_or_else(|| Error::Empty("chain".into()))
}
