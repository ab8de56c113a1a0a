use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{BoxSet, Interval};
use crate::scalar::Scalar;
use crate::spaces::{CellSet, Grid};

use super::partition::face;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum CubeLemmaOutcome {
    /// A point lying in `members.len() ≥ n+1` members.
    CommonPoint { point: Vec<Scalar>, members: Vec<usize> },
    FaceSpanningMember { member: usize, axis: usize },
    /// The members miss a grid point of the cube.
    Uncovered { point: Vec<Scalar> },
    /// No member spans and yet no point reaches depth `n+1`. Only possible
    /// when the members are not faithful to a closed cover of the solid cube.
    Shallow { max_depth: usize },
}

/// Checks a cover of the grid cube `[0, side]^n` by closed sets: either some
/// member meets two opposite faces, or some point lies in `n+1` members.
pub fn cube_lemma_check(cover: &[CellSet], n: usize) -> Result<CubeLemmaOutcome> {
    let grid = cover.first().ok_or_else(|| Error::Empty("cover".into()))?.grid().clone();
    if grid.dim != n {
        return Err(Error::DimensionMismatch { expected: n, got: grid.dim });
    }
    if cover.iter().any(|c| *c.grid() != grid) {
        return Err(Error::invalid("cover members live on different grids"));
    }
    let mut depth = vec![0usize; grid.len()];
    for c in cover {
        for i in c.iter() {
            depth[i] += 1;
        }
    }
    if let Some(i) = depth.iter().position(|&d| d == 0) {
        return Ok(CubeLemmaOutcome::Uncovered { point: grid.point(i) });
    }
    for axis in 0..n {
        let lo = face(&grid, axis, 0);
        let hi = face(&grid, axis, grid.n - 1);
        if let Some(member) = cover.iter().position(|c| c.intersects(&lo) && c.intersects(&hi)) {
            return Ok(CubeLemmaOutcome::FaceSpanningMember { member, axis });
        }
    }
    let (best, &max_depth) = depth.iter().enumerate().max_by_key(|&(i, d)| (*d, std::cmp::Reverse(i))).expect("grid is nonempty");
    if max_depth <= n {
        return Ok(CubeLemmaOutcome::Shallow { max_depth });
    }
    let members = cover.iter().enumerate().filter(|(_, c)| c.contains(best)).map(|(j, _)| j).collect();
    Ok(CubeLemmaOutcome::CommonPoint { point: grid.point(best), members })
}

/// Sorted cut positions in `1..side`, at least one.
fn random_cuts<R: Rng>(side: usize, rng: &mut R) -> Vec<usize> {
    let extra = rng.gen_range(0..=side.saturating_sub(2).min(3));
    let mut cuts = vec![rng.gen_range(1..side)];
    for _ in 0..extra {
        cuts.push(rng.gen_range(1..side));
    }
    cuts.sort_unstable();
    cuts.dedup();
    cuts
}

fn split<R: Rng>(lo: Vec<usize>, hi: Vec<usize>, axis: usize, side: usize, rng: &mut R, out: &mut Vec<(Vec<usize>, Vec<usize>)>) {
    if axis == lo.len() {
        out.push((lo, hi));
        return;
    }
    let cuts = random_cuts(side, rng);
    let mut bounds = vec![0];
    bounds.extend(cuts);
    bounds.push(side);
    for w in bounds.windows(2) {
        let (mut l, mut h) = (lo.clone(), hi.clone());
        l[axis] = w[0];
        h[axis] = w[1];
        split(l, h, axis + 1, side, rng, out);
    }
}

/// Closed integer bricks covering `[0, side]^dim` with no brick meeting two
/// opposite faces: a random k-d subdivision with every brick then grown by
/// up to one unit on each side where that cannot make it span.
pub fn random_brick_cover<R: Rng>(dim: usize, side: usize, rng: &mut R) -> Result<Vec<BoxSet>> {
    if dim == 0 || side < 2 {
        return Err(Error::invalid("need dimension >= 1 and side >= 2"));
    }
    let mut leaves = Vec::new();
    split(vec![0; dim], vec![side; dim], 0, side, rng, &mut leaves);
    leaves
        .into_iter()
        .map(|(mut lo, mut hi)| {
            for a in 0..dim {
                if lo[a] > 0 && hi[a] < side && rng.gen_bool(0.3) {
                    lo[a] -= 1;
                }
                if hi[a] < side && lo[a] > 0 && rng.gen_bool(0.3) {
                    hi[a] += 1;
                }
            }
            let factors = lo
                .iter()
                .zip(&hi)
                .map(|(&l, &h)| Interval::closed(Scalar::from(l as i64), Scalar::from(h as i64)))
                .collect::<Result<Vec<_>>>()?;
            BoxSet::unconstrained(factors)
        })
        .collect()
}

/// Rasterizes bricks on the unit grid of `[0, side]^dim`.
pub fn rasterize_bricks(bricks: &[BoxSet], side: usize) -> Result<Vec<CellSet>> {
    let dim = bricks.first().map(|b| b.dim()).ok_or_else(|| Error::Empty("bricks".into()))?;
    let grid = Grid::new(dim, Scalar::from(side as i64), Scalar::ONE)?;
    bricks.iter().map(|b| crate::spaces::rasterize_box(b, &grid)).collect()
}
