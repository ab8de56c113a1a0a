//! The sup metric, asymptotic unions, and symbolic boxes.

mod boxes;

pub use boxes::{combinations, BoxSet, DeviationConstraint, Fattened, Interval};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};
use crate::spaces::SpaceSpec;

/// A point of a (possibly nested) asymptotic union. `path` lists the block
/// index at each nesting level, outermost first; it is empty for points of a
/// plain space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaggedPoint {
    #[serde(default)]
    pub path: Vec<usize>,
    pub coords: Vec<Scalar>,
}

impl TaggedPoint {
    pub fn plain(coords: Vec<Scalar>) -> Self {
        TaggedPoint { path: Vec::new(), coords }
    }

    pub fn in_block(block: usize, coords: Vec<Scalar>) -> Self {
        TaggedPoint { path: vec![block], coords }
    }

    /// Outermost block index (1 for plain points).
    pub fn block_index(&self) -> usize {
        self.path.first().copied().unwrap_or(1)
    }
}

pub fn sup_distance(p: &[Scalar], q: &[Scalar]) -> Result<Scalar> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: q.len() });
    }
    Ok(p.iter().zip(q).map(|(&a, &b)| (a - b).abs()).fold(Scalar::ZERO, scalar::max))
}

/// Sup distance after zero-padding the shorter tuple.
pub fn padded_sup_distance(p: &[Scalar], q: &[Scalar]) -> Scalar {
    let n = p.len().max(q.len());
    (0..n)
        .map(|i| {
            let a = p.get(i).copied().unwrap_or(Scalar::ZERO);
            let b = q.get(i).copied().unwrap_or(Scalar::ZERO);
            (a - b).abs()
        })
        .fold(Scalar::ZERO, scalar::max)
}

/// Additive constant between blocks `l ≤ k`: `0` if equal, else
/// `l + (l+1) + … + (k−1)`.
pub fn asunion_offset(l: usize, k: usize) -> Result<Scalar> {
    if l == 0 || k == 0 {
        return Err(Error::invalid("block indices start at 1"));
    }
    if l > k {
        return Err(Error::invalid(format!("offset requires l <= k, got l={l}, k={k}")));
    }
    let (l, k) = (l as i128, k as i128);
    Ok(Scalar::int((k * (k - 1) - l * (l - 1)) / 2))
}

/// Sum of the per-level offsets between two block paths.
pub fn path_offset(a: &[usize], b: &[usize]) -> Result<Scalar> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("block paths of different depth: {a:?} vs {b:?}")));
    }
    a.iter().zip(b).try_fold(Scalar::ZERO, |acc, (&x, &y)| {
        Ok(acc + asunion_offset(x.min(y), x.max(y))?)
    })
}

/// `d(x, y) = d_Z(x_l, y_k) + c`, where `d_Z` is the sup metric after
/// zero-padding and `c` accumulates the offsets of every nesting level.
pub fn asunion_distance(x: &TaggedPoint, y: &TaggedPoint, ambient: &SpaceSpec) -> Result<Scalar> {
    for p in [x, y] {
        if !ambient.contains(p)? {
            return Err(Error::NotInSpace(format!("{:?} {:?}", p.path, p.coords)));
        }
    }
    Ok(path_offset(&x.path, &y.path)? + padded_sup_distance(&x.coords, &y.coords))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[&str]) -> Vec<Scalar> {
        xs.iter().map(|x| x.parse().unwrap()).collect()
    }

    #[test]
    fn sup_distance_examples() {
        assert_eq!(sup_distance(&v(&["0", "0"]), &v(&["0", "0"])).unwrap(), Scalar::ZERO);
        assert_eq!(sup_distance(&v(&["0", "3"]), &v(&["4", "0"])).unwrap(), Scalar::int(4));
        assert_eq!(sup_distance(&v(&["1/2", "5"]), &v(&["2", "5"])).unwrap(), "3/2".parse().unwrap());
        assert!(sup_distance(&v(&["0"]), &v(&["0", "1"])).is_err());
    }

    #[test]
    fn offsets() {
        assert_eq!(asunion_offset(3, 3).unwrap(), Scalar::ZERO);
        assert_eq!(asunion_offset(2, 4).unwrap(), Scalar::int(5));
        assert_eq!(asunion_offset(1, 3).unwrap(), Scalar::int(3));
        assert!(asunion_offset(4, 2).is_err());
    }

    #[test]
    fn padded_distance() {
        assert_eq!(padded_sup_distance(&v(&["0", "0"]), &v(&["0", "0", "0", "0"])), Scalar::ZERO);
        assert_eq!(padded_sup_distance(&v(&["1"]), &v(&["0", "-3"])), Scalar::int(3));
    }
}
