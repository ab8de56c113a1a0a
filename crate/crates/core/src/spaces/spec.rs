use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{combinations, Interval, TaggedPoint};
use crate::scalar::Scalar;

/// Default cap on the number of points a window enumeration may produce.
pub const DEFAULT_GUARD: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SpaceKind {
    /// `(scale·ℤ)^dim`.
    LatticePower { scale: Scalar, dim: usize },
    /// Points of `ℝ^dim` (or of `(ambient_lattice·ℤ)^dim`) with at most
    /// `max_deviating` coordinates outside `lattice·ℤ`.
    DeviatingLattice {
        dim: usize,
        lattice: Scalar,
        max_deviating: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ambient_lattice: Option<Scalar>,
    },
    /// Asymptotic union of `blocks`, numbered `start, start+1, …`.
    AsUnion { start: usize, blocks: Vec<SpaceSpec> },
}

/// A space together with the finite window on which it is evaluated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub kind: SpaceKind,
    #[serde(default)]
    pub window: Vec<Interval>,
    pub delta: Scalar,
}

pub fn cube_window(dim: usize, lo: Scalar, hi: Scalar) -> Result<Vec<Interval>> {
    let iv = Interval::closed(lo, hi)?;
    Ok(vec![iv; dim])
}

impl SpaceSpec {
    pub fn lattice_power(scale: Scalar, dim: usize, window_hi: Scalar, delta: Scalar) -> Result<Self> {
        let s = SpaceSpec {
            kind: SpaceKind::LatticePower { scale, dim },
            window: cube_window(dim, Scalar::ZERO, window_hi)?,
            delta,
        };
        s.validate()?;
        Ok(s)
    }

    /// `X_{ω+k}^{(i,n)}`: at most `k` coordinates outside `2^n ℤ`.
    pub fn deviating(i: usize, n: u32, k: usize, window_hi: Scalar, delta: Scalar) -> Result<Self> {
        let s = SpaceSpec {
            kind: SpaceKind::DeviatingLattice {
                dim: i,
                lattice: Scalar::pow2(n),
                max_deviating: k,
                ambient_lattice: None,
            },
            window: cube_window(i, Scalar::ZERO, window_hi)?,
            delta,
        };
        s.validate()?;
        Ok(s)
    }

    /// `Y_{ω+k}^{(i)}`: points of `(2^k ℤ)^i` with at most `k` coordinates
    /// outside `2^i ℤ`.
    pub fn y_block(k: usize, i: usize, window_hi: Scalar) -> Result<Self> {
        let amb = Scalar::pow2(k as u32);
        let s = SpaceSpec {
            kind: SpaceKind::DeviatingLattice {
                dim: i,
                lattice: Scalar::pow2(i as u32),
                max_deviating: k,
                ambient_lattice: Some(amb),
            },
            window: cube_window(i, Scalar::ZERO, window_hi)?,
            delta: amb,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn as_union(start: usize, blocks: Vec<SpaceSpec>) -> Result<Self> {
        let delta = blocks
            .iter()
            .map(|b| b.delta)
            .min()
            .ok_or_else(|| Error::invalid("asymptotic union with no blocks"))?;
        let s = SpaceSpec { kind: SpaceKind::AsUnion { start, blocks }, window: Vec::new(), delta };
        s.validate()?;
        Ok(s)
    }

    /// Ambient dimension of a plain space; `None` for unions.
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            SpaceKind::LatticePower { dim, .. } | SpaceKind::DeviatingLattice { dim, .. } => Some(*dim),
            SpaceKind::AsUnion { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta.is_positive() {
            return Err(Error::invalid(format!("delta must be positive, got {}", self.delta)));
        }
        let mut steps = Vec::new();
        match &self.kind {
            SpaceKind::AsUnion { start, blocks } => {
                if *start == 0 {
                    return Err(Error::invalid("block numbering starts at 1"));
                }
                if blocks.is_empty() {
                    return Err(Error::invalid("asymptotic union with no blocks"));
                }
                return blocks.iter().try_for_each(|b| b.validate());
            }
            SpaceKind::LatticePower { scale, dim } => {
                if *dim == 0 || !scale.is_positive() {
                    return Err(Error::invalid("lattice power needs dim >= 1 and a positive scale"));
                }
                steps.push(*scale);
            }
            SpaceKind::DeviatingLattice { dim, lattice, max_deviating, ambient_lattice } => {
                if *dim == 0 || !lattice.is_positive() {
                    return Err(Error::invalid("deviating lattice needs dim >= 1 and a positive lattice"));
                }
                // max_deviating > dim is a vacuous constraint, which the Y
                // family legitimately produces for small blocks
                let _ = max_deviating;
                match ambient_lattice {
                    // a deviation lattice finer than the ambient one is vacuous
                    Some(a) => steps.push(*a),
                    None => steps.push(*lattice),
                }
            }
        }
        let dim = self.dim().unwrap();
        if self.window.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: self.window.len() });
        }
        for iv in &self.window {
            iv.check()?;
            for e in [iv.lo, iv.hi] {
                if !e.is_multiple_of(self.delta) {
                    return Err(Error::Divisibility { value: e, step: self.delta });
                }
            }
        }
        for s in steps {
            if !s.is_multiple_of(self.delta) {
                return Err(Error::Divisibility { value: s, step: self.delta });
            }
        }
        Ok(())
    }

    /// Membership in the space (the window is not consulted).
    pub fn contains(&self, x: &TaggedPoint) -> Result<bool> {
        self.contains_at(&x.path, &x.coords)
    }

    fn contains_at(&self, path: &[usize], coords: &[Scalar]) -> Result<bool> {
        match &self.kind {
            SpaceKind::AsUnion { start, blocks } => {
                let Some((&b, rest)) = path.split_first() else {
                    return Err(Error::NotInSpace("point of a union needs a block index".into()));
                };
                if b < *start || b >= start + blocks.len() {
                    return Ok(false);
                }
                blocks[b - start].contains_at(rest, coords)
            }
            _ => {
                if !path.is_empty() {
                    return Err(Error::NotInSpace(format!("unexpected block path {path:?}")));
                }
                let dim = self.dim().unwrap();
                if coords.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: coords.len() });
                }
                Ok(self.plain_contains(coords))
            }
        }
    }

    fn plain_contains(&self, coords: &[Scalar]) -> bool {
        match &self.kind {
            SpaceKind::LatticePower { scale, .. } => coords.iter().all(|x| x.is_multiple_of(*scale)),
            SpaceKind::DeviatingLattice { lattice, max_deviating, ambient_lattice, .. } => {
                if let Some(a) = ambient_lattice {
                    if !coords.iter().all(|x| x.is_multiple_of(*a)) {
                        return false;
                    }
                }
                coords.iter().filter(|x| !x.is_multiple_of(*lattice)).count() <= *max_deviating
            }
            SpaceKind::AsUnion { .. } => unreachable!(),
        }
    }

    /// Per-coordinate candidate values in the window, split into lattice and
    /// off-lattice values (for deviating lattices) or a single list.
    pub(crate) fn axis_values(&self) -> Vec<(Vec<Scalar>, Vec<Scalar>)> {
        let (step, lattice) = match &self.kind {
            SpaceKind::LatticePower { scale, .. } => (*scale, None),
            SpaceKind::DeviatingLattice { lattice, ambient_lattice, .. } => {
                (ambient_lattice.unwrap_or(self.delta), Some(*lattice))
            }
            SpaceKind::AsUnion { .. } => unreachable!(),
        };
        self.window
            .iter()
            .map(|iv| {
                let mut on = Vec::new();
                let mut off = Vec::new();
                if let Some((first, last)) = iv.lattice_span(step) {
                    let (a, b) = (first.div_floor(step), last.div_floor(step));
                    for t in a..=b {
                        let x = step.mul_int(t);
                        match lattice {
                            Some(l) if !x.is_multiple_of(l) => off.push(x),
                            _ => on.push(x),
                        }
                    }
                }
                (on, off)
            })
            .collect()
    }

    /// Number of window points, computed without enumerating them.
    pub fn window_cardinality(&self) -> u128 {
        match &self.kind {
            SpaceKind::AsUnion { blocks, .. } => blocks.iter().map(|b| b.window_cardinality()).sum(),
            SpaceKind::LatticePower { .. } => {
                self.axis_values().iter().map(|(on, _)| on.len() as u128).product()
            }
            SpaceKind::DeviatingLattice { dim, max_deviating, .. } => {
                let vals = self.axis_values();
                let mut total = 0u128;
                for j in 0..=(*max_deviating).min(*dim) {
                    for dev in combinations(*dim, j) {
                        let mut prod = 1u128;
                        for (c, (on, off)) in vals.iter().enumerate() {
                            let n = if dev.contains(&c) { off.len() } else { on.len() };
                            prod = prod.saturating_mul(n as u128);
                        }
                        total = total.saturating_add(prod);
                    }
                }
                total
            }
        }
    }

    /// The δ-grid points of the window that belong to the space, in a
    /// deterministic order.
    pub fn enumerate_window(&self, guard: u128) -> Result<Box<dyn Iterator<Item = TaggedPoint> + '_>> {
        let estimate = self.window_cardinality();
        if estimate > guard {
            return Err(Error::GuardExceeded { what: "window enumeration".into(), estimate, limit: guard });
        }
        Ok(self.points(Vec::new()))
    }

    fn points(&self, prefix: Vec<usize>) -> Box<dyn Iterator<Item = TaggedPoint> + '_> {
        match &self.kind {
            SpaceKind::AsUnion { start, blocks } => Box::new(blocks.iter().enumerate().flat_map(move |(j, b)| {
                let mut p = prefix.clone();
                p.push(start + j);
                b.points(p)
            })),
            SpaceKind::LatticePower { .. } => {
                let lists: Vec<Vec<Scalar>> = self.axis_values().into_iter().map(|(on, _)| on).collect();
                Box::new(Product::new(lists).map(move |c| TaggedPoint { path: prefix.clone(), coords: c }))
            }
            SpaceKind::DeviatingLattice { dim, max_deviating, .. } => {
                let vals = self.axis_values();
                let dim = *dim;
                let subsets: Vec<Vec<usize>> =
                    (0..=(*max_deviating).min(dim)).flat_map(|j| combinations(dim, j)).collect();
                Box::new(subsets.into_iter().flat_map(move |dev| {
                    let lists: Vec<Vec<Scalar>> = vals
                        .iter()
                        .enumerate()
                        .map(|(c, (on, off))| if dev.contains(&c) { off.clone() } else { on.clone() })
                        .collect();
                    let prefix = prefix.clone();
                    Product::new(lists).map(move |c| TaggedPoint { path: prefix.clone(), coords: c })
                }))
            }
        }
    }

    /// Window membership for a plain-space point.
    pub fn in_window(&self, coords: &[Scalar]) -> bool {
        self.window.len() == coords.len() && self.window.iter().zip(coords).all(|(iv, &x)| iv.contains(x))
    }

    /// The plain block reached by following `path`.
    pub fn block_at(&self, path: &[usize]) -> Result<&SpaceSpec> {
        match (&self.kind, path.split_first()) {
            (_, None) => Ok(self),
            (SpaceKind::AsUnion { start, blocks }, Some((&b, rest))) => {
                if b < *start || b >= start + blocks.len() {
                    return Err(Error::NotInSpace(format!("block {b} outside the union")));
                }
                blocks[b - start].block_at(rest)
            }
            _ => Err(Error::NotInSpace(format!("path {path:?} too deep"))),
        }
    }
}

/// Odometer over the cartesian product of value lists (last axis fastest).
pub(crate) struct Product {
    lists: Vec<Vec<Scalar>>,
    idx: Vec<usize>,
    done: bool,
}

impl Product {
    pub(crate) fn new(lists: Vec<Vec<Scalar>>) -> Self {
        let done = lists.iter().any(|l| l.is_empty());
        let idx = vec![0; lists.len()];
        Product { lists, idx, done }
    }
}

impl Iterator for Product {
    type Item = Vec<Scalar>;

    fn next(&mut self) -> Option<Vec<Scalar>> {
        if self.done {
            return None;
        }
        let out = self.idx.iter().zip(&self.lists).map(|(&i, l)| l[i]).collect();
        let mut c = self.lists.len();
        loop {
            if c == 0 {
                self.done = true;
                break;
            }
            c -= 1;
            self.idx[c] += 1;
            if self.idx[c] < self.lists[c].len() {
                break;
            }
            self.idx[c] = 0;
        }
        Some(out)
    }
}
