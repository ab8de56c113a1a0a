//! Covers of `X_{ω+k}^{(i,n)}` by `k+1` periodic families.
//!
//! The slab families of the textbook construction sit at distance exactly `r`
//! from each other when their slab axes differ, so they are only `r`-disjoint
//! in the non-strict sense. The builders therefore take a `margin`: slabs
//! start `r + margin` away from the lattice and the cube family grows by the
//! same amount. `margin = 0` reproduces the textbook blocks verbatim.

use crate::error::{Error, Result};
use crate::metric::{combinations, BoxSet, DeviationConstraint, Interval};
use crate::scalar::Scalar;
use crate::spaces::SpaceSpec;

use super::family::{CoverBundle, PeriodicFamily};

/// Margin used by the default builders.
pub const DEFAULT_MARGIN: Scalar = Scalar::ONE;

/// Families of one induction level together with the separation they are
/// guaranteed to have (`d(U, V) ≥ separation` for distinct blocks).
#[derive(Clone, Debug)]
pub struct Level {
    pub families: Vec<PeriodicFamily>,
    pub n: u32,
    pub separation: Scalar,
    /// Distance from the lattice at which the newest slab family starts.
    pub slab_start: Scalar,
}

fn point_factor() -> Interval {
    Interval::point(Scalar::ZERO)
}

/// Prototype with closed slab `[s, P − s]` on the axes in `axes` and the
/// lattice point 0 elsewhere.
fn slab_prototype(dim: usize, axes: &[usize], s: Scalar, period: Scalar) -> Result<BoxSet> {
    let slab = Interval::closed(s, period - s)?;
    let factors = (0..dim).map(|c| if axes.contains(&c) { slab.clone() } else { point_factor() }).collect();
    BoxSet::unconstrained(factors)
}

fn two_family_level(rho: u32, i: usize, margin: Scalar) -> Result<Level> {
    if i == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if margin.is_negative() {
        return Err(Error::invalid("negative margin"));
    }
    let period = Scalar::pow2(rho);
    let r = Scalar::from(rho);
    let s = r + margin;
    // neighbouring cubes are P − 2s apart; that must stay ≥ s
    if period < s.mul_int(3) {
        return Err(Error::hypothesis(format!(
            "2^{rho} = {period} is too small for cubes of half-width {s}; need r >= 4"
        )));
    }
    let cube = BoxSet::new(
        vec![Interval::open(-s, s)?; i],
        Some(DeviationConstraint::new(period, 1)?),
    )?;
    let u0 = PeriodicFamily::plain(format!("U0 (n={rho})"), vec![cube], vec![period; i], period)?;
    let slabs = (0..i).map(|j| slab_prototype(i, &[j], s, period)).collect::<Result<Vec<_>>>()?;
    let u1 = PeriodicFamily::plain(format!("U1 (n={rho})"), slabs, vec![period; i], period)?;
    Ok(Level { families: vec![u0, u1], n: rho, separation: s, slab_start: s })
}

/// Families `U_0, …, U_k` for `X_{ω+k}^{(i,n)}` with `n = 3^{k−1}·r`.
pub fn k_family_level(r: u32, k: usize, i: usize, margin: Scalar) -> Result<Level> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k == 1 {
        if r < 4 {
            return Err(Error::hypothesis(format!("the two-family cover needs r >= 4, got {r}")));
        }
        return two_family_level(r, i, margin);
    }
    if r < 2 {
        return Err(Error::hypothesis(format!("the inductive cover needs r > 1, got {r}")));
    }
    if k > i {
        return Err(Error::invalid(format!("k = {k} slab axes do not fit in dimension {i}")));
    }
    let lower = k_family_level(r.checked_mul(3).ok_or_else(|| Error::invalid("r overflow"))?, k - 1, i, margin)?;
    let period = Scalar::pow2(lower.n);
    let r_s = Scalar::from(r);
    let spare = lower.separation - Scalar::from(3 * r);
    let f = r_s + spare.half().half();
    let mut families = Vec::with_capacity(k + 1);
    for (j, fam) in lower.families.iter().enumerate() {
        families.push(fam.fattened(f, format!("U{j} (n={}, fattened by {f})", lower.n))?);
    }
    let slabs = combinations(i, k)
        .iter()
        .map(|axes| slab_prototype(i, axes, f, period))
        .collect::<Result<Vec<_>>>()?;
    families.push(PeriodicFamily::plain(format!("U{k} (n={})", lower.n), slabs, vec![period; i], period)?);
    Ok(Level {
        families,
        n: lower.n,
        separation: scalar_min(lower.separation - f - f, f),
        slab_start: f,
    })
}

fn scalar_min(a: Scalar, b: Scalar) -> Scalar {
    crate::scalar::min(a, b)
}

fn bundle(level: Level, r: u32, k: usize, i: usize, margin: Scalar) -> Result<CoverBundle> {
    let period = Scalar::pow2(level.n);
    let target = SpaceSpec::deviating(i, level.n, k, period.mul_int(2), Scalar::ONE)?;
    let bound = level.families.iter().map(|f| f.claimed_bound).max().unwrap_or(Scalar::ZERO);
    let mut notes = vec![format!("n = {}, slab start {}, guaranteed separation {}", level.n, level.slab_start, level.separation)];
    if margin.is_zero() {
        notes.push("verbatim blocks: slab families are only non-strictly r-disjoint".into());
    }
    Ok(CoverBundle {
        families: level.families,
        claimed_disjointness: Scalar::from(r),
        claimed_bound: bound,
        target,
        partial: false,
        fattened_by: None,
        notes,
    })
}

/// Two families covering `X_{ω+1}^{(i,r)}`, period `2^r`.
pub fn build_two_family_cover(r: u32, i: usize) -> Result<CoverBundle> {
    build_two_family_cover_with_margin(r, i, DEFAULT_MARGIN)
}

pub fn build_two_family_cover_with_margin(r: u32, i: usize, margin: Scalar) -> Result<CoverBundle> {
    if r < 4 {
        return Err(Error::hypothesis(format!("the two-family cover needs r >= 4, got {r}")));
    }
    let level = two_family_level(r, i, margin)?;
    bundle(level, r, 1, i, margin)
}

/// `k+1` families covering `X_{ω+k}^{(i,n)}` with `n = 3^{k−1}·r`.
pub fn build_k_family_cover(r: u32, k: usize, i: usize) -> Result<CoverBundle> {
    build_k_family_cover_with_margin(r, k, i, DEFAULT_MARGIN)
}

pub fn build_k_family_cover_with_margin(r: u32, k: usize, i: usize, margin: Scalar) -> Result<CoverBundle> {
    let level = k_family_level(r, k, i, margin)?;
    bundle(level, r, k, i, margin)
}

/// `3^{k−1}·r`.
pub fn lattice_exponent(r: u32, k: usize) -> Result<u32> {
    (1..k).try_fold(r, |n, _| n.checked_mul(3)).ok_or_else(|| Error::invalid("lattice exponent overflows"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::TaggedPoint;

    fn s(n: i64) -> Scalar {
        Scalar::from(n)
    }

    #[test]
    fn verbatim_two_family_shapes() {
        let b = build_two_family_cover_with_margin(4, 4, Scalar::ZERO).unwrap();
        assert_eq!(b.families.len(), 2);
        let u0 = &b.families[0].parts[0];
        assert_eq!(u0.period, vec![s(16); 4]);
        assert_eq!(u0.prototypes[0].factors[0], Interval::open(s(-4), s(4)).unwrap());
        let u1 = &b.families[1].parts[0];
        assert_eq!(u1.prototypes.len(), 4);
        assert_eq!(u1.prototypes[2].factors[2], Interval::closed(s(4), s(12)).unwrap());
        assert_eq!(u1.prototypes[2].factors[0], Interval::point(s(0)));
    }

    #[test]
    fn small_r_rejected() {
        assert!(build_two_family_cover(3, 4).is_err());
        assert!(build_k_family_cover(3, 1, 4).is_err());
        assert!(build_k_family_cover(1, 2, 6).is_err());
    }

    #[test]
    fn k_two_verbatim_slabs() {
        let b = build_k_family_cover_with_margin(2, 2, 6, Scalar::ZERO).unwrap();
        assert_eq!(b.families.len(), 3);
        let u2 = &b.families[2].parts[0];
        assert_eq!(u2.prototypes.len(), 15);
        assert_eq!(u2.period[0], s(64));
        assert_eq!(u2.prototypes[0].factors[0], Interval::closed(s(2), s(62)).unwrap());
        assert_eq!(u2.prototypes[0].factors[1], Interval::closed(s(2), s(62)).unwrap());
        // lower families are the k=1 families at n=6 fattened by r=2
        let u0 = &b.families[0].parts[0].prototypes[0];
        assert_eq!(u0.factors[0], Interval::open(s(-8), s(8)).unwrap());
        assert!(b.families[0].over_approximate);
    }

    #[test]
    fn k_family_covers_sample_points() {
        let b = build_k_family_cover(2, 2, 6).unwrap();
        let covered = |c: &[i64]| {
            let p = TaggedPoint::plain(c.iter().map(|&x| s(x)).collect());
            b.families.iter().any(|f| !f.blocks_containing(&p).is_empty())
        };
        assert!(covered(&[0, 0, 0, 0, 0, 0]));
        assert!(covered(&[30, 0, 0, 0, 64, 0]));
        assert!(covered(&[30, 31, 0, 0, 0, 0]));
        assert!(covered(&[7, 31, 0, 0, 0, 0]));
    }

    #[test]
    fn exponent() {
        assert_eq!(lattice_exponent(2, 2).unwrap(), 6);
        assert_eq!(lattice_exponent(4, 4).unwrap(), 108);
    }
}
