//! Covers of asymptotic unions: tail singletons, the composite bundle for
//! `Y_{2ω}`, the decomposition of `X_ω(g)`, and brick families of `ℝ^d`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{BoxSet, Interval};
use crate::scalar::Scalar;
use crate::spaces::{SpaceKind, SpaceSpec};

use super::family::{CoverBundle, FamilyPart, PeriodicFamily, Provenance};
use super::lattice::{k_family_level, lattice_exponent, DEFAULT_MARGIN};

/// Largest dimension for which the brick decomposition of the
/// finite-dimensional part is materialised.
pub const BRICK_DIM_LIMIT: usize = 3;

/// Singletons of every window point whose outermost block index exceeds
/// `threshold`. Empty when the window has no such block.
pub fn build_tail_singletons(ambient: &SpaceSpec, threshold: usize, guard: u128) -> Result<PeriodicFamily> {
    if !matches!(ambient.kind, SpaceKind::AsUnion { .. }) {
        return Err(Error::invalid("tail singletons need an asymptotic union"));
    }
    let mut parts: BTreeMap<Vec<usize>, Vec<BoxSet>> = BTreeMap::new();
    for p in ambient.enumerate_window(guard)? {
        if p.block_index() > threshold {
            parts.entry(p.path.clone()).or_default().push(BoxSet::point(&p.coords));
        }
    }
    let parts = parts
        .into_iter()
        .map(|(path, protos)| {
            let dim = protos[0].dim();
            FamilyPart::new(path, protos, vec![Scalar::ZERO; dim])
        })
        .collect::<Result<Vec<_>>>()?;
    let label = if parts.is_empty() { format!("tail > {threshold} (empty)") } else { format!("tail > {threshold}") };
    Ok(PeriodicFamily {
        label,
        provenance: Provenance::Tail,
        parts,
        claimed_bound: Scalar::ZERO,
        over_approximate: false,
    })
}

/// Window of `Y_{2ω}`: outer blocks `k = 1..=k_max`, each holding the single
/// inner block `Y_{ω+k}^{(i)}` for `i = inner(k)`, with window `[0, hi]^i`.
///
/// Keeping one inner block per outer block matters: distinct inner blocks of
/// the same `Y_{ω+k}` can be as close as 1, so singletons spread over them
/// are not `n`-disjoint.
pub fn y2omega_thin_space(k_max: usize, inner: impl Fn(usize) -> usize, hi: Scalar) -> Result<SpaceSpec> {
    let mut outer = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let i = inner(k);
        // align the window to the block's own lattice
        let step = Scalar::pow2(k as u32);
        let block = SpaceSpec::y_block(k, i, step.mul_int(hi.div_floor(step)))?;
        outer.push(SpaceSpec::as_union(i, vec![block])?);
    }
    SpaceSpec::as_union(1, outer)
}

/// The finite-dimensional bound `3^{r−1}·r` used by the composite cover.
pub fn finite_part_dimension(r: u32) -> Result<u32> {
    lattice_exponent(r, r as usize)
}

/// `r(r+3)/2 + 3^{r−1}·r + 2`.
pub fn y2omega_family_bound(r: u32) -> Result<u128> {
    let r128 = r as u128;
    Ok(r128 * (r128 + 3) / 2 + finite_part_dimension(r)? as u128 + 2)
}

/// Composite cover of `Y_{2ω}` at scale `r`: the tail singletons on `window`,
/// the lattice covers of `Y_{ω+k}^{(i)}` for `k ≤ r` and `i ≥ 3^{k−1}r`, and
/// the families of the finite-dimensional part.
///
/// Lattice families are materialised in dimension `min(n_k, 2k+1)`; blocks of
/// those families are products, so every pair of blocks in higher dimension
/// restricts to a pair in that dimension with the same distance. The
/// finite-dimensional part is stubbed once its dimension exceeds
/// [`BRICK_DIM_LIMIT`], and the bundle is then marked partial.
pub fn build_y2omega_cover(r: u32, window: &SpaceSpec, guard: u128) -> Result<CoverBundle> {
    if r < 4 {
        return Err(Error::hypothesis(format!("the composite cover needs r >= 4, got {r}")));
    }
    let rs = Scalar::from(r);
    let mut families = Vec::new();
    let mut notes = Vec::new();

    let mut tail = build_tail_singletons(window, r as usize, guard)?;
    tail.label = format!("tail: singletons of blocks k > {r}");
    families.push(tail);

    let mut bound = Scalar::ZERO;
    for k in 1..=r as usize {
        let n = lattice_exponent(r, k)?;
        let thin = (n as usize).min(2 * k + 1);
        let level = k_family_level(r, k, thin, DEFAULT_MARGIN)?;
        for (j, mut fam) in level.families.into_iter().enumerate() {
            fam.label = format!("lattice-cover k={k} family {j} (i >= {n}, shown in dimension {thin})");
            for part in &mut fam.parts {
                part.path = vec![k, n as usize];
            }
            bound = crate::scalar::max(bound, fam.claimed_bound);
            families.push(fam);
        }
    }

    let d = finite_part_dimension(r)? as usize;
    let partial = d > BRICK_DIM_LIMIT;
    if partial {
        for j in 0..=d {
            families.push(PeriodicFamily::assumed(format!("finite-dim part: assumed family {j} of {}", d + 1), bound));
        }
        notes.push(format!(
            "finite-dimensional part has dimension {d}; its {} families are assumed (external construction)",
            d + 1
        ));
    } else {
        for mut fam in brick_families(d, r)? {
            fam.label = format!("finite-dim part: {}", fam.label);
            families.push(fam);
        }
    }
    notes.push(format!("lattice-part families: {}", r * (r + 3) / 2));
    Ok(CoverBundle {
        families,
        claimed_disjointness: rs,
        claimed_bound: bound,
        target: window.clone(),
        partial,
        fattened_by: None,
        notes,
    })
}

/// `d + 1` families of closed bricks covering `ℝ^d`, each `r`-disjoint.
///
/// Family `j` is the tiling by cubes of edge `L = 2(d+1)m`, `m = (r+1)/2`,
/// shifted by `j·L/(d+1)` along the diagonal, with every cube shrunk by `m`.
/// A coordinate is within `m` of the cube faces of at most one shifted
/// tiling, so some family contains each point.
pub fn brick_families(d: usize, r: u32) -> Result<Vec<PeriodicFamily>> {
    if d == 0 {
        return Err(Error::invalid("brick decomposition needs d >= 1"));
    }
    let m = Scalar::from(r + 1).half();
    let edge = m.mul_int(2 * (d as i128 + 1));
    let mut out = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let shift = m.mul_int(2 * j as i128);
        let iv = Interval::closed(shift + m, shift + edge - m)?;
        let bx = BoxSet::unconstrained(vec![iv; d])?;
        let mut fam = PeriodicFamily::plain(format!("bricks shift {j}"), vec![bx], vec![edge; d], edge - m - m)?;
        fam.provenance = Provenance::FiniteDim;
        out.push(fam);
    }
    Ok(out)
}

/// `max(1, ⌊log2 i⌋ − 1)`, a lower bound for the exact `g̃(i)`.
pub fn g_tilde_low(i: usize) -> u32 {
    assert!(i >= 1, "block indices start at 1");
    let lg = usize::BITS - 1 - i.leading_zeros();
    lg.saturating_sub(1).max(1)
}

/// Smallest `i` with `g̃_low(i) > r`.
pub fn singleton_threshold(r: u32) -> usize {
    // g̃_low(i) > r  ⇔  ⌊log2 i⌋ ≥ r + 2
    1usize << (r + 2)
}

/// `X_ω(g)` on a window together with its `r`-decomposition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct XOmegaDecomposition {
    pub space: SpaceSpec,
    pub surrogate: Vec<u32>,
    pub r: u32,
    /// First block index covered by singletons.
    pub threshold: usize,
    pub singletons: PeriodicFamily,
    /// Blocks `1..threshold`, a finite asymptotic union.
    pub remainder: SpaceSpec,
    pub remainder_max_dim: usize,
}

/// Builds `X_ω(g) = as⊔ (2^{g̃(i)}ℤ)^{g(i)}` for the tabulated `g`
/// (`g[0] = g(1)`) using the surrogate [`g_tilde_low`], on thin windows
/// (first axis `[0, 2·2^{g̃(i)}]`, other axes pinned to 0), and splits it
/// into singletons on blocks `i ≥ M(r)` and the remainder.
pub fn build_x_omega_g(g: &[usize], r: u32, guard: u128) -> Result<XOmegaDecomposition> {
    if g.is_empty() || g[0] == 0 {
        return Err(Error::invalid("g must be tabulated with positive values"));
    }
    if g.windows(2).any(|w| w[1] < w[0]) || g.first() == g.last() {
        return Err(Error::invalid("g must be increasing on the table"));
    }
    let surrogate: Vec<u32> = (1..=g.len()).map(g_tilde_low).collect();
    let mut blocks = Vec::with_capacity(g.len());
    for (idx, (&dim, &e)) in g.iter().zip(&surrogate).enumerate() {
        let scale = Scalar::pow2(e);
        let mut window = vec![Interval::point(Scalar::ZERO); dim];
        window[0] = Interval::closed(Scalar::ZERO, scale.mul_int(2))?;
        let b = SpaceSpec { kind: SpaceKind::LatticePower { scale, dim }, window, delta: scale };
        b.validate().map_err(|e| Error::invalid(format!("block {}: {e}", idx + 1)))?;
        blocks.push(b);
    }
    let space = SpaceSpec::as_union(1, blocks.clone())?;
    let threshold = singleton_threshold(r);
    if threshold > g.len() {
        return Err(Error::invalid(format!("table too short: M({r}) = {threshold} > {}", g.len())));
    }
    let mut singletons = build_tail_singletons(&space, threshold - 1, guard)?;
    singletons.label = format!("singletons of blocks i >= {threshold}");
    let remainder = SpaceSpec::as_union(1, blocks[..threshold - 1].to_vec())?;
    let remainder_max_dim = g[..threshold - 1].iter().copied().max().unwrap_or(0);
    Ok(XOmegaDecomposition { space, surrogate, r, threshold, singletons, remainder, remainder_max_dim })
}
