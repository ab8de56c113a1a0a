use coarse_core::analysis::{multiplicity, validate_coverage, CoverageMode, StatMode};
use coarse_core::cover::{build_k_family_cover, build_two_family_cover, CoverBundle};
use coarse_core::refuter::{partition_descent, positive_control, Outcome};
use coarse_core::spaces::DEFAULT_GUARD;
use coarse_core::{Scalar, SpaceSpec, TaggedPoint};

#[test]
fn deviating_window_matches_direct_count() {
    let spec = SpaceSpec::deviating(2, 2, 1, Scalar::from(4), Scalar::ONE).unwrap();
    let listed: Vec<TaggedPoint> = spec.enumerate_window(DEFAULT_GUARD).unwrap().collect();
    let direct = (0..=4i64)
        .flat_map(|x| (0..=4i64).map(move |y| (x, y)))
        .filter(|&(x, y)| x % 4 == 0 || y % 4 == 0)
        .count();
    assert_eq!(listed.len(), direct);
    assert!(listed.iter().all(|p| spec.contains(p).unwrap()));
}

#[test]
fn bundles_round_trip_through_json() {
    let b = build_k_family_cover(2, 2, 6).unwrap();
    let back = CoverBundle::from_json(&b.to_json().unwrap()).unwrap();
    assert_eq!(b, back);
}

#[test]
fn two_family_cover_has_depth_at_most_two() {
    let b = build_two_family_cover(4, 2).unwrap();
    assert!(validate_coverage(&b, CoverageMode::Exhaustive, DEFAULT_GUARD).unwrap().is_ok());
    let m = multiplicity(&b, DEFAULT_GUARD).unwrap();
    assert_eq!(m.mode, StatMode::Exact);
    assert!(m.value <= 2);
}

#[test]
fn positive_control_completes_for_both_scales() {
    for b in [4, 8] {
        let input = positive_control(Scalar::from(b)).unwrap();
        let r = partition_descent(&input, DEFAULT_GUARD).unwrap();
        assert!(matches!(r.outcome, Outcome::DescentComplete { .. }), "B={b}: {:?}", r.outcome);
    }
    assert!(positive_control(Scalar::from(6)).is_err());
}
