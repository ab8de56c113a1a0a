use serde::{Deserialize, Serialize};

use crate::cover::CoverBundle;
use crate::error::{Error, Result};
use crate::metric::TaggedPoint;
use crate::scalar::{self, Scalar};
use crate::spaces::{SpaceKind, SpaceSpec};

use super::validate::{validate_coverage, CoverageCheck, CoverageMode};

/// How a statistic was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatMode {
    /// Evaluated at every window point.
    Exact,
    /// Upper bound from the family count (each family is disjoint, so it
    /// contributes depth at most 1).
    BoundOnly,
    /// Lower bound from the fattening radius of a cover.
    ByConstruction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityReport {
    pub value: usize,
    pub mode: StatMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<TaggedPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LebesgueReport {
    pub value: Scalar,
    pub mode: StatMode,
    /// A window point attaining the minimum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<TaggedPoint>,
    pub points_checked: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdReport {
    pub lambda: Scalar,
    pub ad_value: usize,
    pub lambda_mode: StatMode,
    pub multiplicity_mode: StatMode,
}

fn max_plain_dim(spec: &SpaceSpec) -> usize {
    match &spec.kind {
        SpaceKind::AsUnion { blocks, .. } => blocks.iter().map(max_plain_dim).max().unwrap_or(0),
        _ => spec.dim().unwrap_or(0),
    }
}

/// Dimension limit for the exact multiplicity sweep.
pub const EXACT_MULTIPLICITY_DIM: usize = 3;

/// Largest number of blocks sharing a window point.
///
/// Exact on windows of dimension at most [`EXACT_MULTIPLICITY_DIM`] whose
/// point count fits the guard; otherwise the family count.
pub fn multiplicity(bundle: &CoverBundle, guard: u128) -> Result<MultiplicityReport> {
    let exact = !bundle.partial
        && max_plain_dim(&bundle.target) <= EXACT_MULTIPLICITY_DIM
        && bundle.target.window_cardinality() <= guard;
    if !exact {
        return Ok(MultiplicityReport { value: bundle.families.len(), mode: StatMode::BoundOnly, witness: None });
    }
    let mut best = 0;
    let mut witness = None;
    for x in bundle.target.enumerate_window(guard)? {
        let d = super::validate::point_depth(bundle, &x);
        if d > best {
            best = d;
            witness = Some(x);
        }
    }
    Ok(MultiplicityReport { value: best, mode: StatMode::Exact, witness })
}

/// `min_x max_{U ∋ x} inradius_U(x)` over the window points, where the
/// inradius is the distance from `x` to the complement of the block's
/// product of intervals in the ambient `ℝ^d`. Blocks are not clipped to the
/// window. The value is 0 if some point is uncovered.
pub fn lebesgue_number(bundle: &CoverBundle, guard: u128) -> Result<LebesgueReport> {
    let mut best: Option<(Scalar, TaggedPoint)> = None;
    let mut checked = 0u64;
    for x in bundle.target.enumerate_window(guard)? {
        checked += 1;
        let mut here: Option<Scalar> = None;
        for f in &bundle.families {
            for b in f.blocks_containing(&x) {
                let rad = f.block(&b).inradius_at(&x.coords);
                here = Some(here.map_or(rad, |h| scalar::max(h, rad)));
            }
        }
        let v = here.unwrap_or(Scalar::ZERO);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, x));
        }
    }
    let (value, at) = match best {
        Some((v, x)) => (v, Some(x)),
        None => return Err(Error::Empty("window".into())),
    };
    Ok(LebesgueReport { value, mode: StatMode::Exact, at, points_checked: checked })
}

/// `(L(U), m(U) − 1)`: an upper-bound datapoint for `ad_X(λ)` at
/// `λ = L(U)`.
///
/// A partial bundle cannot be evaluated pointwise; it must carry a
/// fattening radius, which then serves as `λ`, and the family count bounds
/// the multiplicity.
pub fn ad_report(bundle: &CoverBundle, guard: u128) -> Result<AdReport> {
    if bundle.partial {
        let lambda = bundle
            .fattened_by
            .ok_or_else(|| Error::hypothesis("a partial bundle needs a fattening radius to report ad"))?;
        return Ok(AdReport {
            lambda,
            ad_value: bundle.families.len().saturating_sub(1),
            lambda_mode: StatMode::ByConstruction,
            multiplicity_mode: StatMode::BoundOnly,
        });
    }
    if let CoverageCheck::Uncovered { point } = validate_coverage(bundle, CoverageMode::Exhaustive, guard)? {
        return Err(Error::hypothesis(format!("not a cover: {:?} {:?} is uncovered", point.path, point.coords)));
    }
    let l = lebesgue_number(bundle, guard)?;
    let m = multiplicity(bundle, guard)?;
    Ok(AdReport {
        lambda: l.value,
        ad_value: m.value.saturating_sub(1),
        lambda_mode: l.mode,
        multiplicity_mode: m.mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::PeriodicFamily;
    use crate::metric::{BoxSet, Interval};
    use crate::spaces::DEFAULT_GUARD;

    fn s(n: i64) -> Scalar {
        Scalar::from(n)
    }

    fn bundle(protos: Vec<(Interval, i64)>, hi: i64) -> CoverBundle {
        let families = protos
            .into_iter()
            .map(|(iv, p)| {
                PeriodicFamily::plain("f", vec![BoxSet::unconstrained(vec![iv]).unwrap()], vec![s(p)], s(p)).unwrap()
            })
            .collect();
        CoverBundle {
            families,
            claimed_disjointness: Scalar::ZERO,
            claimed_bound: s(8),
            target: SpaceSpec::lattice_power(Scalar::ONE, 1, s(hi), Scalar::ONE).unwrap(),
            partial: false,
            fattened_by: None,
            notes: Vec::new(),
        }
    }

    #[test]
    fn touching_closed_blocks_have_zero_lebesgue_number() {
        let b = bundle(vec![(Interval::closed(s(0), s(4)).unwrap(), 4)], 16);
        assert_eq!(lebesgue_number(&b, DEFAULT_GUARD).unwrap().value, Scalar::ZERO);
    }

    #[test]
    fn overlapping_open_blocks() {
        let b = bundle(vec![(Interval::open(s(-3), s(3)).unwrap(), 4)], 16);
        assert_eq!(lebesgue_number(&b, DEFAULT_GUARD).unwrap().value, s(1));
    }

    #[test]
    fn fattened_bricks_in_dimension_one() {
        let half_open = |a, b| Interval::new(s(a), s(b), true, false).unwrap();
        let b = bundle(vec![(half_open(0, 2), 4), (half_open(2, 4), 4)], 16);
        let f = b.fattened(s(1)).unwrap();
        let m = multiplicity(&f, DEFAULT_GUARD).unwrap();
        assert_eq!((m.value, m.mode), (2, StatMode::Exact));
        let single = bundle(vec![(half_open(0, 2), 4)], 16);
        assert_eq!(multiplicity(&single, DEFAULT_GUARD).unwrap().value, 1);
    }

    #[test]
    fn ad_of_fattened_line_bricks() {
        let half_open = |a, b| Interval::new(s(a), s(b), true, false).unwrap();
        let b = bundle(vec![(half_open(0, 2), 4), (half_open(2, 4), 4)], 16).fattened(s(1)).unwrap();
        let rep = ad_report(&b, DEFAULT_GUARD).unwrap();
        assert!(rep.lambda >= s(1));
        assert_eq!(rep.ad_value, 1);
        let mut gap = bundle(vec![(half_open(0, 2), 4)], 16);
        gap.families.truncate(1);
        assert!(ad_report(&gap, DEFAULT_GUARD).is_err());
    }

    #[test]
    fn fattening_raises_lebesgue_number() {
        let b = bundle(vec![(Interval::closed(s(0), s(4)).unwrap(), 4)], 16);
        let l0 = lebesgue_number(&b, DEFAULT_GUARD).unwrap().value;
        let l1 = lebesgue_number(&b.fattened(s(1)).unwrap(), DEFAULT_GUARD).unwrap().value;
        assert!(l1 >= l0 + s(1));
    }
}
