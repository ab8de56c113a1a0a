use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use coarse_core::analysis::sample_window_point;
use coarse_core::metric::{asunion_distance, sup_distance, TaggedPoint};
use coarse_core::refuter::{cube_lemma_check, epsilon_partition, random_brick_cover, rasterize_bricks, CubeLemmaOutcome};
use coarse_core::spaces::rasterize_box;
use coarse_core::{BoxSet, CellSet, Grid, Interval, Scalar, SpaceSpec};

fn dyadic() -> impl Strategy<Value = Scalar> {
    (-4096i128..4096, 0u32..4).prop_map(|(n, e)| Scalar::new(n, e))
}

fn union_space() -> SpaceSpec {
    let s = Scalar::from;
    SpaceSpec::as_union(
        1,
        vec![
            SpaceSpec::lattice_power(s(1), 2, s(6), s(1)).unwrap(),
            SpaceSpec::deviating(2, 2, 1, s(8), Scalar::inv_pow2(1)).unwrap(),
            SpaceSpec::lattice_power(s(4), 3, s(8), s(4)).unwrap(),
        ],
    )
    .unwrap()
}

proptest! {
    #[test]
    fn sup_metric_axioms(p in prop::collection::vec(dyadic(), 3), q in prop::collection::vec(dyadic(), 3), r in prop::collection::vec(dyadic(), 3)) {
        let d = |a: &[Scalar], b: &[Scalar]| sup_distance(a, b).unwrap();
        prop_assert_eq!(d(&p, &q), d(&q, &p));
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r));
        prop_assert_eq!(d(&p, &q).is_zero(), p == q);
    }

    #[test]
    fn asunion_metric_axioms(seed in any::<u64>()) {
        let space = union_space();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<TaggedPoint> = (0..3).map(|_| sample_window_point(&space, &mut rng).unwrap()).collect();
        let d = |a: &TaggedPoint, b: &TaggedPoint| asunion_distance(a, b, &space).unwrap();
        let (x, y, z) = (&pts[0], &pts[1], &pts[2]);
        prop_assert_eq!(d(x, y), d(y, x));
        prop_assert!(d(x, z) <= d(x, y) + d(y, z));
        prop_assert!(d(x, x).is_zero());
        prop_assert_eq!(d(x, y).is_zero(), x == y);
    }

    #[test]
    fn partition_invariants_hold(
        axis in 0usize..2,
        lo in prop::collection::vec((0usize..20, 0usize..20), 0..4),
        eps_halves in 1i64..4,
    ) {
        // grid [0, 12]^2 at δ = 1/2; blocks are 2×2 squares
        let b = Scalar::from(12);
        let grid = Grid::new(2, b, Scalar::inv_pow2(1)).unwrap();
        let eps = Scalar::inv_pow2(1).mul_int(eps_halves as i128);
        let mut fam: Vec<CellSet> = Vec::new();
        for (x, y) in lo {
            let iv = |v: usize| Interval::closed(Scalar::from(v as i64), Scalar::from(v as i64 + 2)).unwrap();
            let c = rasterize_box(&BoxSet::unconstrained(vec![iv(x / 2), iv(y / 2)]).unwrap(), &grid).unwrap();
            if fam.iter().all(|u| u.distance_to(&c).is_none_or(|d| d > eps)) {
                fam.push(c);
            }
        }
        let carrier = CellSet::full(&grid);
        let p = epsilon_partition(&carrier, &fam, axis, eps, b).unwrap();
        prop_assert!(p.invariants(&carrier).all());
        prop_assert!(!p.l.is_empty());
    }

    #[test]
    fn non_spanning_brick_covers_have_deep_points(seed in any::<u64>(), n in 1usize..=3, side in 3usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bricks = random_brick_cover(n, side, &mut rng).unwrap();
        let cells = rasterize_bricks(&bricks, side).unwrap();
        match cube_lemma_check(&cells, n).unwrap() {
            CubeLemmaOutcome::CommonPoint { point, members } => {
                prop_assert!(members.len() > n);
                prop_assert!(members.iter().all(|&m| bricks[m].contains(&point)));
            }
            o => prop_assert!(false, "unexpected {:?}", o),
        }
    }
}
