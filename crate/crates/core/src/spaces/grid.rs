//! Finite δ-grids on `[0, side]^dim`, dense point sets on them, and the
//! partition of the cube into cells of a fixed edge.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{BoxSet, Interval, TaggedPoint};
use crate::scalar::Scalar;

use super::spec::SpaceSpec;

/// The points `δ·ℤ^dim ∩ [0, side]^dim`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub delta: Scalar,
    /// Points per axis, `side/δ + 1`.
    pub n: usize,
}

impl Grid {
    pub fn new(dim: usize, side: Scalar, delta: Scalar) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("grid dimension must be positive"));
        }
        if !delta.is_positive() || side.is_negative() {
            return Err(Error::invalid(format!("bad grid: side {side}, delta {delta}")));
        }
        if !side.is_multiple_of(delta) {
            return Err(Error::Divisibility { value: side, step: delta });
        }
        let n = side.div_floor(delta) as usize + 1;
        Ok(Grid { dim, delta, n })
    }

    pub fn side(&self) -> Scalar {
        self.delta.mul_int(self.n as i128 - 1)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks that `len()` stays under `guard`.
    pub fn check_guard(&self, guard: u128) -> Result<()> {
        let est = (self.n as u128).saturating_pow(self.dim as u32);
        if est > guard {
            return Err(Error::GuardExceeded { what: "grid".into(), estimate: est, limit: guard });
        }
        Ok(())
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.dim);
        for _ in 0..self.dim {
            out.push(idx % self.n);
            idx /= self.n;
        }
        out
    }

    pub fn index(&self, mi: &[usize]) -> usize {
        mi.iter().rev().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn point(&self, idx: usize) -> Vec<Scalar> {
        self.multi_index(idx).into_iter().map(|i| self.delta.mul_int(i as i128)).collect()
    }

    /// Index of the grid point at `coords`, if it is one.
    pub fn locate(&self, coords: &[Scalar]) -> Option<usize> {
        if coords.len() != self.dim {
            return None;
        }
        let mut mi = Vec::with_capacity(self.dim);
        for &x in coords {
            if !x.is_multiple_of(self.delta) {
                return None;
            }
            let i = x.div_floor(self.delta);
            if i < 0 || i >= self.n as i128 {
                return None;
            }
            mi.push(i as usize);
        }
        Some(self.index(&mi))
    }

    /// Grid index range `[a, b]` of the values in `iv`, clipped to the grid.
    fn axis_range(&self, iv: &Interval) -> Option<(usize, usize)> {
        let (first, last) = iv.lattice_span(self.delta)?;
        let a = first.div_floor(self.delta).max(0);
        let b = last.div_floor(self.delta).min(self.n as i128 - 1);
        (a <= b).then_some((a as usize, b as usize))
    }

    /// Calls `f` on every index in the product of per-axis index ranges.
    fn for_each_in_ranges(&self, ranges: &[(usize, usize)], mut f: impl FnMut(usize, &[usize])) {
        let mut mi: Vec<usize> = ranges.iter().map(|r| r.0).collect();
        loop {
            f(self.index(&mi), &mi);
            let mut c = 0;
            loop {
                if c == self.dim {
                    return;
                }
                mi[c] += 1;
                if mi[c] <= ranges[c].1 {
                    break;
                }
                mi[c] = ranges[c].0;
                c += 1;
            }
        }
    }
}

/// A dense set of grid points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellSet {
    grid: Grid,
    words: Vec<u64>,
}

impl CellSet {
    pub fn empty(grid: &Grid) -> Self {
        CellSet { grid: grid.clone(), words: vec![0; grid.len().div_ceil(64)] }
    }

    pub fn full(grid: &Grid) -> Self {
        let mut s = Self::empty(grid);
        for i in 0..grid.len() {
            s.insert(i);
        }
        s
    }

    pub fn from_indices(grid: &Grid, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(grid);
        for i in idx {
            s.insert(i);
        }
        s
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn contains_point(&self, coords: &[Scalar]) -> bool {
        self.grid.locate(coords).is_some_and(|i| self.contains(i))
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    fn zip_with(&self, other: &CellSet, f: impl Fn(u64, u64) -> u64) -> CellSet {
        assert_eq!(self.grid, other.grid, "cell sets on different grids");
        CellSet {
            grid: self.grid.clone(),
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &CellSet) -> CellSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &CellSet) -> CellSet {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.words.iter().zip(&other.words).all(|(&a, &b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &CellSet) -> bool {
        self.words.iter().zip(&other.words).any(|(&a, &b)| a & b != 0)
    }

    /// Chebyshev distance (in grid steps) from every grid point to the set;
    /// `u32::MAX` everywhere when the set is empty.
    pub fn distance_transform(&self) -> Vec<u32> {
        let g = &self.grid;
        let mut dist = vec![u32::MAX; g.len()];
        let mut queue = VecDeque::new();
        for i in self.iter() {
            dist[i] = 0;
            queue.push_back(i);
        }
        let offsets = neighbour_offsets(g.dim);
        while let Some(i) = queue.pop_front() {
            let mi = g.multi_index(i);
            let d = dist[i] + 1;
            'nb: for off in &offsets {
                let mut j = 0usize;
                let mut stride = 1usize;
                for c in 0..g.dim {
                    let v = mi[c] as isize + off[c];
                    if v < 0 || v >= g.n as isize {
                        continue 'nb;
                    }
                    j += v as usize * stride;
                    stride *= g.n;
                }
                if dist[j] == u32::MAX {
                    dist[j] = d;
                    queue.push_back(j);
                }
            }
        }
        dist
    }

    /// `{p : d(p, S) < rho}` restricted to the grid.
    pub fn open_neighborhood(&self, rho: Scalar) -> CellSet {
        let dt = self.distance_transform();
        let delta = self.grid.delta;
        CellSet::from_indices(
            &self.grid,
            dt.iter().enumerate().filter(|(_, &d)| d != u32::MAX && delta.mul_int(d as i128) < rho).map(|(i, _)| i),
        )
    }

    /// `{p : d(p, S) ≤ rho}` restricted to the grid.
    pub fn closed_neighborhood(&self, rho: Scalar) -> CellSet {
        let dt = self.distance_transform();
        let delta = self.grid.delta;
        CellSet::from_indices(
            &self.grid,
            dt.iter().enumerate().filter(|(_, &d)| d != u32::MAX && delta.mul_int(d as i128) <= rho).map(|(i, _)| i),
        )
    }

    /// Distance between two nonempty sets.
    pub fn distance_to(&self, other: &CellSet) -> Option<Scalar> {
        if self.is_empty() || other.is_empty() {
            return None;
        }
        let dt = self.distance_transform();
        other.iter().map(|i| dt[i]).min().map(|d| self.grid.delta.mul_int(d as i128))
    }

    /// Sup-metric diameter; `None` for the empty set.
    pub fn diameter(&self) -> Option<Scalar> {
        let d = self.grid.dim;
        let mut lo = vec![usize::MAX; d];
        let mut hi = vec![0usize; d];
        let mut any = false;
        for i in self.iter() {
            any = true;
            for (c, v) in self.grid.multi_index(i).into_iter().enumerate() {
                lo[c] = lo[c].min(v);
                hi[c] = hi[c].max(v);
            }
        }
        any.then(|| {
            let span = (0..d).map(|c| hi[c] - lo[c]).max().unwrap_or(0);
            self.grid.delta.mul_int(span as i128)
        })
    }

    /// Connected components under king-move adjacency (grid distance 1).
    pub fn components(&self) -> Vec<CellSet> {
        let g = &self.grid;
        let offsets = neighbour_offsets(g.dim);
        let mut seen = CellSet::empty(g);
        let mut out = Vec::new();
        for s in self.iter() {
            if seen.contains(s) {
                continue;
            }
            let mut comp = CellSet::empty(g);
            let mut stack = vec![s];
            seen.insert(s);
            while let Some(i) = stack.pop() {
                comp.insert(i);
                let mi = g.multi_index(i);
                'nb: for off in &offsets {
                    let mut nj = Vec::with_capacity(g.dim);
                    for c in 0..g.dim {
                        let v = mi[c] as isize + off[c];
                        if v < 0 || v >= g.n as isize {
                            continue 'nb;
                        }
                        nj.push(v as usize);
                    }
                    let j = g.index(&nj);
                    if self.contains(j) && !seen.contains(j) {
                        seen.insert(j);
                        stack.push(j);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn points(&self) -> Vec<Vec<Scalar>> {
        self.iter().map(|i| self.grid.point(i)).collect()
    }
}

fn neighbour_offsets(dim: usize) -> Vec<Vec<isize>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|v: Vec<isize>| {
                [-1, 0, 1].into_iter().map(move |o| {
                    let mut w = v.clone();
                    w.push(o);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&o| o != 0));
    out
}

/// Grid points lying in `bx`.
pub fn rasterize_box(bx: &BoxSet, grid: &Grid) -> Result<CellSet> {
    if bx.dim() != grid.dim {
        return Err(Error::DimensionMismatch { expected: grid.dim, got: bx.dim() });
    }
    let mut out = CellSet::empty(grid);
    let Some(ranges) = bx.factors.iter().map(|iv| grid.axis_range(iv)).collect::<Option<Vec<_>>>() else {
        return Ok(out);
    };
    grid.for_each_in_ranges(&ranges, |i, mi| {
        let p: Vec<Scalar> = mi.iter().map(|&v| grid.delta.mul_int(v as i128)).collect();
        if bx.contains(&p) {
            out.insert(i);
        }
    });
    Ok(out)
}

/// Grid points that belong to a plain space (its window is ignored).
pub fn rasterize_space(space: &SpaceSpec, grid: &Grid) -> Result<CellSet> {
    if space.dim() != Some(grid.dim) {
        return Err(Error::invalid("rasterization needs a plain space of the grid's dimension"));
    }
    let mut out = CellSet::empty(grid);
    for i in 0..grid.len() {
        if space.contains(&TaggedPoint::plain(grid.point(i)))? {
            out.insert(i);
        }
    }
    Ok(out)
}

/// Partition of `[0, side]^dim` into closed cubes of edge `edge`, numbered
/// `0..p^dim` in mixed radix `p = side/edge` with axis 0 fastest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeGrid {
    pub dim: usize,
    pub side: Scalar,
    pub edge: Scalar,
    pub p: usize,
}

pub fn cube_grid(side: Scalar, dim: usize, edge: Scalar) -> Result<CubeGrid> {
    if !edge.is_positive() || !side.is_positive() || dim == 0 {
        return Err(Error::invalid("cube grid needs positive side, edge and dimension"));
    }
    if !side.is_multiple_of(edge) {
        return Err(Error::Divisibility { value: side, step: edge });
    }
    Ok(CubeGrid { dim, side, edge, p: side.div_floor(edge) as usize })
}

impl CubeGrid {
    pub fn num_cells(&self) -> usize {
        self.p.pow(self.dim as u32)
    }

    /// Mixed-radix digits of cell `t`.
    pub fn cell_index(&self, mut t: usize) -> Vec<usize> {
        (0..self.dim)
            .map(|_| {
                let d = t % self.p;
                t /= self.p;
                d
            })
            .collect()
    }

    pub fn cell_box(&self, t: usize) -> BoxSet {
        let factors = self
            .cell_index(t)
            .into_iter()
            .map(|d| {
                let lo = self.edge.mul_int(d as i128);
                Interval::closed(lo, lo + self.edge).expect("edge is positive")
            })
            .collect();
        BoxSet { factors, constraint: None }
    }

    /// Cells whose closure contains a point of `set`.
    pub fn cells_meeting(&self, set: &CellSet) -> Result<Vec<usize>> {
        let g = set.grid();
        if g.dim != self.dim || !self.edge.is_multiple_of(g.delta) {
            return Err(Error::invalid("cell grid not aligned with the point grid"));
        }
        let steps = self.edge.div_floor(g.delta) as usize;
        let mut hit = vec![false; self.num_cells()];
        for i in set.iter() {
            let mi = g.multi_index(i);
            // each coordinate lies in one cell, or two when on a cell face
            let mut choices: Vec<Vec<usize>> = Vec::with_capacity(self.dim);
            for &v in &mi {
                let q = v / steps;
                let mut c = Vec::with_capacity(2);
                if q < self.p {
                    c.push(q);
                }
                if v % steps == 0 && q > 0 {
                    c.push(q - 1);
                }
                choices.push(c);
            }
            let mut stack = vec![(0usize, 0usize, 1usize)];
            while let Some((axis, acc, stride)) = stack.pop() {
                if axis == self.dim {
                    hit[acc] = true;
                    continue;
                }
                for &c in &choices[axis] {
                    stack.push((axis + 1, acc + c * stride, stride * self.p));
                }
            }
        }
        Ok(hit.iter().enumerate().filter(|(_, &h)| h).map(|(t, _)| t).collect())
    }
}

/// Points of the `j`-skeleton of the union of the given cells: grid points of
/// a closed selected cell with at least `dim − j` coordinates on cell faces.
pub fn skeleton(cubes: &CubeGrid, cells: &[usize], j: usize, grid: &Grid) -> Result<CellSet> {
    if grid.dim != cubes.dim {
        return Err(Error::DimensionMismatch { expected: cubes.dim, got: grid.dim });
    }
    if !cubes.edge.is_multiple_of(grid.delta) {
        return Err(Error::Divisibility { value: cubes.edge, step: grid.delta });
    }
    let steps = cubes.edge.div_floor(grid.delta) as usize;
    let need = cubes.dim.saturating_sub(j);
    let mut out = CellSet::empty(grid);
    for &t in cells {
        let digits = cubes.cell_index(t);
        let ranges: Vec<(usize, usize)> = digits
            .iter()
            .map(|&d| (d * steps, ((d + 1) * steps).min(grid.n - 1)))
            .collect();
        if ranges.iter().any(|&(a, b)| a > b) {
            continue;
        }
        grid.for_each_in_ranges(&ranges, |i, mi| {
            if mi.iter().filter(|&&v| v % steps == 0).count() >= need {
                out.insert(i);
            }
        });
    }
    Ok(out)
}
