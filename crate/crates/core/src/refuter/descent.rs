//! The partition descent that rules out `m+k+1` disjoint families covering
//! `X_{ω+k}^{(m+k)}`.
//!
//! The cube is `[0, 6B]^d` with `d = m+k`, cut into cells of edge `e = 2^d`.
//! Positive families are fattened by `e`, partitioned against one axis each,
//! and the leftover layer is snapped to the `(d−j)`-skeleton of the cells it
//! meets. Negative families are then partitioned against the remaining axes.
//! Whatever survives is a point no family covers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{BoxSet, Interval, TaggedPoint};
use crate::scalar::{self, Scalar};
use crate::spaces::{cube_grid, rasterize_box, skeleton, CellSet, Grid};

use super::partition::{epsilon_partition, PartitionResult};

/// Largest cube dimension the descent accepts.
pub const MAX_DESCENT_DIM: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentFamily {
    pub label: String,
    pub blocks: Vec<BoxSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentInput {
    pub m: usize,
    pub k: usize,
    pub b: Scalar,
    pub delta: Scalar,
    /// `m` families claimed `2^{m+k+2}`-disjoint and `B`-bounded.
    pub pos: Vec<DescentFamily>,
    /// `k` families claimed `neg_disjointness`-disjoint and `B`-bounded.
    pub neg: Vec<DescentFamily>,
    pub neg_disjointness: Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Violated {
    Disjoint,
    Bounded,
    Partition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    WitnessPoint { point: TaggedPoint, uncovered_by: Vec<String> },
    HypothesisFailure { family: String, violated: Violated, evidence: String },
    DescentComplete { contradiction: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepTrace {
    pub step: usize,
    pub kind: StepKind,
    pub family: String,
    pub axis: usize,
    pub epsilon: Scalar,
    pub carrier_points: usize,
    pub partition_points: usize,
    /// Cells of edge `2^d` still meeting the partition (positive steps).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells_retained: Option<usize>,
    pub layer_points: usize,
    /// The layer misses every block of the family just processed.
    pub avoids_family: bool,
    /// `δ ≤ ε/4`, so the `ε/3` fattening is resolved by the grid.
    pub resolved: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    pub outcome: Outcome,
    pub trace: Vec<StepTrace>,
}

impl Refutation {
    fn fail(family: &str, violated: Violated, evidence: String, trace: Vec<StepTrace>) -> Self {
        Refutation {
            outcome: Outcome::HypothesisFailure { family: family.to_string(), violated, evidence },
            trace,
        }
    }
}

/// Edge `2^{m+k}` of the snapping cells.
pub fn descent_edge(m: usize, k: usize) -> Scalar {
    Scalar::pow2((m + k) as u32)
}

/// Partition width for the positive steps: `e` when `e < B`, otherwise
/// `7e/8`, which still keeps the face collars wider than a cell.
pub fn positive_epsilon(m: usize, k: usize, b: Scalar) -> Result<Scalar> {
    let e = descent_edge(m, k);
    let eps = if e < b { e } else { e.mul_int(7).shift(-3) };
    if eps >= b {
        return Err(Error::hypothesis(format!("B = {b} is too small for cells of edge {e}")));
    }
    Ok(eps)
}

fn check_blocks(fam: &DescentFamily, dim: usize, sep: Scalar, bound: Scalar) -> Result<Option<(Violated, String)>> {
    for (i, u) in fam.blocks.iter().enumerate() {
        if u.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: u.dim() });
        }
        let d = u.diameter()?;
        if d > bound {
            return Ok(Some((Violated::Bounded, format!("block {i} has diameter {d} > {bound}"))));
        }
    }
    for i in 0..fam.blocks.len() {
        for j in i + 1..fam.blocks.len() {
            let d = fam.blocks[i].distance(&fam.blocks[j])?;
            if d <= sep {
                return Ok(Some((Violated::Disjoint, format!("blocks {i} and {j} are at distance {d} <= {sep}"))));
            }
        }
    }
    Ok(None)
}

fn covering_labels(point: &[Scalar], families: &[&DescentFamily]) -> (Vec<String>, Vec<String>) {
    let mut hit = Vec::new();
    let mut miss = Vec::new();
    for f in families {
        if f.blocks.iter().any(|u| u.contains(point)) {
            hit.push(f.label.clone());
        } else {
            miss.push(f.label.clone());
        }
    }
    (hit, miss)
}

fn rasterize_all(fam: &DescentFamily, grid: &Grid) -> Result<Vec<CellSet>> {
    let mut out = Vec::new();
    for u in &fam.blocks {
        let c = rasterize_box(u, grid)?;
        if !c.is_empty() {
            out.push(c);
        }
    }
    Ok(out)
}

fn partition_or_fail(carrier: &CellSet, family: &[CellSet], axis: usize, eps: Scalar, side: Scalar) -> Result<std::result::Result<PartitionResult, String>> {
    match epsilon_partition(carrier, family, axis, eps, side) {
        Ok(p) => Ok(Ok(p)),
        Err(Error::Hypothesis(msg)) => Ok(Err(msg)),
        Err(e) => Err(e),
    }
}

/// Runs the descent on `[0, 6B]^{m+k}` at resolution `δ`.
pub fn partition_descent(input: &DescentInput, guard: u128) -> Result<Refutation> {
    let (m, k) = (input.m, input.k);
    let d = m + k;
    if d == 0 || d > MAX_DESCENT_DIM {
        return Err(Error::invalid(format!("m + k must be in 1..={MAX_DESCENT_DIM}, got {d}")));
    }
    if input.pos.len() != m || input.neg.len() != k {
        return Err(Error::invalid(format!(
            "expected {m} positive and {k} negative families, got {} and {}",
            input.pos.len(),
            input.neg.len()
        )));
    }
    let e = descent_edge(m, k);
    let b = input.b;
    let side = b.mul_int(6);
    if !e.is_multiple_of(input.delta) {
        return Err(Error::Divisibility { value: e, step: input.delta });
    }
    let grid = Grid::new(d, side, input.delta)?;
    grid.check_guard(guard)?;
    let cubes = cube_grid(side, d, e)?;
    let eps_pos = positive_epsilon(m, k, b)?;
    if !input.neg_disjointness.is_positive() {
        return Err(Error::invalid("negative families need a positive disjointness"));
    }
    let eps_neg = scalar::min(input.neg_disjointness, eps_pos);

    let pos_sep = Scalar::pow2((d + 2) as u32);
    for f in &input.pos {
        if let Some((v, ev)) = check_blocks(f, d, pos_sep, b)? {
            return Ok(Refutation::fail(&f.label, v, ev, Vec::new()));
        }
    }
    for f in &input.neg {
        if let Some((v, ev)) = check_blocks(f, d, input.neg_disjointness, b)? {
            return Ok(Refutation::fail(&f.label, v, ev, Vec::new()));
        }
    }

    let mut trace = Vec::with_capacity(d);
    let mut carrier = CellSet::full(&grid);
    let mut cells: Vec<usize> = (0..cubes.num_cells()).collect();
    for (j, fam) in input.pos.iter().enumerate() {
        let blocks = rasterize_all(fam, &grid)?;
        let fat: Vec<CellSet> = blocks.iter().map(|c| c.open_neighborhood(e)).collect();
        let part = match partition_or_fail(&carrier, &fat, j, eps_pos, side)? {
            Ok(p) => p,
            Err(msg) => return Ok(Refutation::fail(&fam.label, Violated::Partition, msg, trace)),
        };
        let meeting = cubes.cells_meeting(&part.l)?;
        cells.retain(|t| meeting.binary_search(t).is_ok());
        let layer = skeleton(&cubes, &cells, d - (j + 1), &grid)?.intersection(&carrier);
        trace.push(StepTrace {
            step: j + 1,
            kind: StepKind::Positive,
            family: fam.label.clone(),
            axis: j,
            epsilon: eps_pos,
            carrier_points: carrier.count(),
            partition_points: part.l.count(),
            cells_retained: Some(cells.len()),
            layer_points: layer.count(),
            avoids_family: blocks.iter().all(|c| !c.intersects(&layer)),
            resolved: input.delta.mul_int(4) <= eps_pos,
        });
        carrier = layer;
    }

    let all: Vec<&DescentFamily> = input.pos.iter().chain(&input.neg).collect();
    if let Some(i) = carrier.iter().find(|&i| covering_labels(&grid.point(i), &all).0.is_empty()) {
        let (_, miss) = covering_labels(&grid.point(i), &all);
        return Ok(Refutation {
            outcome: Outcome::WitnessPoint { point: TaggedPoint::plain(grid.point(i)), uncovered_by: miss },
            trace,
        });
    }

    for (j, fam) in input.neg.iter().enumerate() {
        let axis = m + j;
        let blocks = rasterize_all(fam, &grid)?;
        let part = match partition_or_fail(&carrier, &blocks, axis, eps_neg, side)? {
            Ok(p) => p,
            Err(msg) => return Ok(Refutation::fail(&fam.label, Violated::Partition, msg, trace)),
        };
        trace.push(StepTrace {
            step: m + j + 1,
            kind: StepKind::Negative,
            family: fam.label.clone(),
            axis,
            epsilon: eps_neg,
            carrier_points: carrier.count(),
            partition_points: part.l.count(),
            cells_retained: None,
            layer_points: part.l.count(),
            avoids_family: blocks.iter().all(|c| !c.intersects(&part.l)),
            resolved: input.delta.mul_int(4) <= eps_neg,
        });
        carrier = part.l;
    }

    if let Some(i) = carrier.iter().next() {
        let p = grid.point(i);
        let (_, miss) = covering_labels(&p, &all);
        return Ok(Refutation { outcome: Outcome::WitnessPoint { point: TaggedPoint::plain(p), uncovered_by: miss }, trace });
    }
    let unresolved = trace.iter().filter(|t| !t.resolved).count();
    let contradiction = if unresolved == 0 {
        "the final partition is empty although every step was resolved".to_string()
    } else {
        format!("the final partition is empty; {unresolved} step(s) ran below the grid resolution")
    };
    Ok(Refutation { outcome: Outcome::DescentComplete { contradiction }, trace })
}

/// A cover of `X_{ω+1}^{(2)}` (lattice 4) on `[0, 6B]^2` for `m = k = 1`,
/// `B ∈ {4, 8}`, `δ = 1/2`: positive squares 17 apart, negative singletons
/// at every lattice point they miss. The descent must end with
/// `DescentComplete`.
pub fn positive_control(b: Scalar) -> Result<DescentInput> {
    let (side, start) = if b == Scalar::from(4) {
        (1, 5)
    } else if b == Scalar::from(8) {
        (4, 3)
    } else {
        return Err(Error::invalid(format!("the positive control is defined for B = 4 or 8, got {b}")));
    };
    let top = b.mul_int(6);
    let pitch = side + 17;
    let mut pos = Vec::new();
    let mut x = start;
    while Scalar::from(x) <= top {
        let mut y = start;
        while Scalar::from(y) <= top {
            pos.push(BoxSet::unconstrained(vec![
                Interval::closed(Scalar::from(x), Scalar::from(x + side))?,
                Interval::closed(Scalar::from(y), Scalar::from(y + side))?,
            ])?);
            y += pitch;
        }
        x += pitch;
    }
    let delta = Scalar::inv_pow2(1);
    let grid = Grid::new(2, top, delta)?;
    let neg = (0..grid.len())
        .map(|i| grid.point(i))
        .filter(|p| p.iter().any(|c| c.is_multiple_of(Scalar::from(4))))
        .filter(|p| !pos.iter().any(|u| u.contains(p)))
        .map(|p| BoxSet::point(&p))
        .collect();
    Ok(DescentInput {
        m: 1,
        k: 1,
        b,
        delta,
        pos: vec![DescentFamily { label: "pos".into(), blocks: pos }],
        neg: vec![DescentFamily { label: "neg".into(), blocks: neg }],
        neg_disjointness: Scalar::inv_pow2(2),
    })
}
