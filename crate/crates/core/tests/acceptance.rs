//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! All comparisons are exact (dyadic rationals, zero tolerance). Each line
//! also reports the wall time against the criterion's pinned budget; going
//! over budget counts as a failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coarse_core::analysis::{
    sample_window_point, validate_bounded, validate_coverage, validate_disjoint, CoverageCheck, CoverageMode,
};
use coarse_core::cover::{
    build_k_family_cover, build_k_family_cover_with_margin, build_two_family_cover, build_x_omega_g,
    build_y2omega_cover, k_family_level, lattice_exponent, y2omega_family_bound, y2omega_thin_space, PeriodicFamily,
    Provenance, DEFAULT_MARGIN,
};
use coarse_core::metric::{asunion_distance, BoxSet, Interval, TaggedPoint};
use coarse_core::refuter::{
    ad_lower_certify, check_nested, cube_lemma_check, epsilon_partition, partition_descent, random_brick_cover,
    rasterize_bricks, CubeLemmaOutcome, DescentFamily, DescentInput, Outcome, Violated, DEFAULT_NODE_BUDGET,
};
use coarse_core::spaces::{rasterize_box, DEFAULT_GUARD};
use coarse_core::{CellSet, Grid, Scalar, SpaceKind, SpaceSpec};

type Check = Result<String, String>;

fn s(n: i64) -> Scalar {
    Scalar::from(n)
}

fn half() -> Scalar {
    Scalar::inv_pow2(1)
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

// ---------------------------------------------------------------- 1

fn two_family_covers() -> Check {
    let mut points = 0u64;
    for r in [4u32, 5, 6] {
        for i in [r as usize, r as usize + 1] {
            let b = build_two_family_cover(r, i).map_err(err)?;
            let bound = Scalar::pow2(r);
            for f in &b.families {
                let d = validate_disjoint(f, s(r as i64), Some(&b.target), DEFAULT_GUARD).map_err(err)?;
                if !d.is_ok() {
                    return Err(format!("r={r} i={i} {}: {d:?}", f.label));
                }
                let bd = validate_bounded(f, bound).map_err(err)?;
                if !bd.is_ok() {
                    return Err(format!("r={r} i={i} {}: {bd:?}", f.label));
                }
            }
            match validate_coverage(&b, CoverageMode::Exhaustive, DEFAULT_GUARD).map_err(err)? {
                CoverageCheck::Ok { points_checked } => points += points_checked,
                CoverageCheck::Uncovered { point } => return Err(format!("r={r} i={i}: {:?} uncovered", point.coords)),
            }
        }
    }
    Ok(format!("6 instances r-disjoint, 2^r-bounded, {points} window points covered"))
}

// ---------------------------------------------------------------- 2

/// `d(x, X_{ω+m})` for a point whose coordinates are at lattice distances
/// `dists`: the nearest point of the skeleton snaps the smallest nonzero
/// distances until at most `m` remain.
fn distance_to_skeleton(dists: &[Scalar], m: usize) -> Scalar {
    let mut nz: Vec<Scalar> = dists.iter().copied().filter(|d| !d.is_zero()).collect();
    nz.sort();
    if nz.len() <= m {
        Scalar::ZERO
    } else {
        nz[nz.len() - m - 1]
    }
}

fn lattice_distance(x: Scalar, period: Scalar) -> Scalar {
    let lo = period.mul_int(x.div_floor(period));
    let a = x - lo;
    let b = lo + period - x;
    if a < b {
        a
    } else {
        b
    }
}

/// Coordinate values of `[0, 2P]` at `δ = 1/2` used on each free axis.
/// With `full` every grid value is used. Otherwise only the values within
/// `reach` of `Pℤ` plus `P/2` and `3P/2`: every predicate in the check
/// depends on a coordinate only through its lattice distance compared with
/// thresholds below `reach`, so the remaining values behave like `P/2`.
fn axis_values(period: Scalar, reach: Scalar, full: bool) -> Vec<Scalar> {
    let top = period.mul_int(2);
    let steps = top.div_floor(half());
    (0..=steps)
        .map(|j| half().mul_int(j))
        .filter(|&v| full || lattice_distance(v, period) <= reach || v == period.half() || v == period.mul_int(3).half())
        .collect()
}

/// Points of `X_{ω+k}^{(i,n)}` on the slice where `axes` are free and all
/// other coordinates are 0 that are neither covered by `top` nor within
/// `rho` of `X_{ω+k−1}`. Returns the first such point.
fn residual_violation(
    top: &PeriodicFamily,
    i: usize,
    k: usize,
    axes: &[usize],
    values: &[Scalar],
    period: Scalar,
    rho: Scalar,
) -> (Option<Vec<Scalar>>, u64) {
    let mut idx = vec![0usize; axes.len()];
    let mut checked = 0;
    loop {
        let mut coords = vec![Scalar::ZERO; i];
        for (a, &j) in axes.iter().zip(&idx) {
            coords[*a] = values[j];
        }
        let dists: Vec<Scalar> = coords.iter().map(|&c| lattice_distance(c, period)).collect();
        let dev = dists.iter().filter(|d| !d.is_zero()).count();
        if dev <= k {
            checked += 1;
            let p = TaggedPoint::plain(coords.clone());
            if top.blocks_containing(&p).is_empty() && distance_to_skeleton(&dists, k - 1) >= rho {
                return (Some(coords), checked);
            }
        }
        let mut a = 0;
        loop {
            if a == idx.len() {
                return (None, checked);
            }
            idx[a] += 1;
            if idx[a] < values.len() {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

fn inductive_covers() -> Check {
    let mut lines = Vec::new();
    for (r, k) in [(2u32, 2usize), (2, 3)] {
        let n = lattice_exponent(r, k).map_err(err)?;
        let i = n as usize;
        let period = Scalar::pow2(n);
        let rs = s(r as i64);
        let b = build_k_family_cover(r, k, i).map_err(err)?;
        for f in &b.families {
            let d = validate_disjoint(f, rs, None, DEFAULT_GUARD).map_err(err)?;
            if !d.is_ok() {
                return Err(format!("(r,k)=({r},{k}) {}: {d:?}", f.label));
            }
            let bd = validate_bounded(f, b.claimed_bound).map_err(err)?;
            if !bd.is_ok() {
                return Err(format!("(r,k)=({r},{k}) {}: {bd:?}", f.label));
            }
        }
        let f_start = k_family_level(r, k, i, DEFAULT_MARGIN).map_err(err)?.slab_start;
        let verbatim = build_k_family_cover_with_margin(r, k, i, Scalar::ZERO).map_err(err)?;
        // all k-subsets of axes are equivalent under coordinate permutations
        let slices: Vec<Vec<usize>> = if k == 2 {
            (0..i).flat_map(|a| (a + 1..i).map(move |b| vec![a, b])).collect()
        } else {
            vec![vec![0, 1, 2], vec![0, i / 2, i - 1], vec![i - 3, i - 2, i - 1]]
        };
        let values = axis_values(period, f_start + s(1), k == 2);
        let mut checked = 0;
        let mut default_nr = None;
        for axes in &slices {
            let (v, c) = residual_violation(&verbatim.families[k], i, k, axes, &values, period, rs);
            checked += c;
            if let Some(p) = v {
                return Err(format!("(r,k)=({r},{k}) verbatim residual not within N_{r}: {p:?}"));
            }
            let (v, _) = residual_violation(&b.families[k], i, k, axes, &values, period, f_start);
            if let Some(p) = v {
                return Err(format!("(r,k)=({r},{k}) default residual not within N_{f_start}: {p:?}"));
            }
            if default_nr.is_none() {
                default_nr = residual_violation(&b.families[k], i, k, axes, &values, period, rs).0;
            }
        }
        let note = match default_nr {
            Some(p) => {
                let nz: Vec<String> = p.iter().filter(|c| !c.is_zero()).map(|c| c.to_string()).collect();
                format!("margin build leaves ({}) outside N_{r}", nz.join(","))
            }
            None => "margin build also within N_r".into(),
        };
        lines.push(format!(
            "(r,k)=({r},{k}) {} families ok; residual on {} slices, {checked} points: verbatim within N_{r}, margin build within N_{f_start} ({note})",
            b.families.len(),
            slices.len()
        ));
    }
    Ok(lines.join("; "))
}

// ---------------------------------------------------------------- 3, 4

/// A random `ε`-disjoint family of boxes of diameter `≤ B/3` on `grid`.
fn random_family(grid: &Grid, eps: Scalar, rng: &mut ChaCha8Rng) -> Vec<CellSet> {
    let side_steps = grid.n - 1;
    let max_steps = grid.side().div_floor(grid.delta.mul_int(3)) as usize;
    let mut fam: Vec<CellSet> = Vec::new();
    for _ in 0..rng.gen_range(0..8) {
        let factors: Vec<Interval> = (0..grid.dim)
            .map(|_| {
                let len = rng.gen_range(0..=max_steps);
                let lo = rng.gen_range(0..=side_steps - len);
                Interval::closed(grid.delta.mul_int(lo as i128), grid.delta.mul_int((lo + len) as i128)).unwrap()
            })
            .collect();
        let c = rasterize_box(&BoxSet::unconstrained(factors).unwrap(), grid).unwrap();
        if fam.iter().all(|u| u.distance_to(&c).is_none_or(|d| d > eps)) {
            fam.push(c);
        }
    }
    fam
}

fn random_setup(rng: &mut ChaCha8Rng) -> (Grid, Scalar, Scalar) {
    let dim = rng.gen_range(1..=3);
    let b = s([12, 18, 24][rng.gen_range(0..3)]);
    let delta = if dim == 3 { half() } else { Scalar::inv_pow2(rng.gen_range(1..=2)) };
    // ε ∈ {1/2, 1, …} with 6ε < B
    let eps_max = b.div_ceil(s(6)) as i64 * 2 - 1;
    let eps = half().mul_int(rng.gen_range(1..=eps_max) as i128);
    (Grid::new(dim, b, delta).unwrap(), b, eps)
}

fn epsilon_partitions() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut blocks = 0;
    for t in 0..200 {
        let (grid, b, eps) = random_setup(&mut rng);
        let fam = random_family(&grid, eps, &mut rng);
        blocks += fam.len();
        let axis = rng.gen_range(0..grid.dim);
        let carrier = CellSet::full(&grid);
        let p = epsilon_partition(&carrier, &fam, axis, eps, b).map_err(|e| format!("instance {t}: {e}"))?;
        let inv = p.invariants(&carrier);
        if !inv.all() {
            return Err(format!("instance {t}: {inv:?}"));
        }
        for u in &fam {
            let dt = u.distance_transform();
            // d(p, U) < ε/3  ⇔  3·d·δ < ε
            if p.l.iter().any(|i| grid.delta.mul_int(3 * dt[i] as i128) < eps) {
                return Err(format!("instance {t}: L meets N_(eps/3) of a block"));
            }
        }
    }
    Ok(format!("200 instances ({blocks} blocks), all four invariants hold, L avoids N_(eps/3)(family)"))
}

fn nested_chains() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut min_final = usize::MAX;
    for t in 0..100 {
        let (grid, b, eps) = random_setup(&mut rng);
        let mut chain = vec![CellSet::full(&grid)];
        for axis in 0..grid.dim {
            let fam = random_family(&grid, eps, &mut rng);
            let carrier = chain.last().unwrap().clone();
            let p = epsilon_partition(&carrier, &fam, axis, eps, b).map_err(|e| format!("chain {t}: {e}"))?;
            if !p.invariants(&carrier).all() {
                return Err(format!("chain {t}: invariants fail on axis {axis}"));
            }
            chain.push(p.l);
        }
        if !check_nested(&chain).map_err(err)? {
            return Err(format!("chain {t} (dim {}) ends empty", grid.dim));
        }
        min_final = min_final.min(chain.last().unwrap().count());
    }
    Ok(format!("100 chains end nonempty (smallest final set {min_final} points)"))
}

// ---------------------------------------------------------------- 5

/// Positive family of squares of side `a` on a lattice of pitch `pitch`
/// starting at `start`, inside `[0, 6B]^2`.
fn positive_family(b: Scalar, start: i64, a: i64, pitch: i64) -> Vec<BoxSet> {
    let top = b.mul_int(6);
    let mut out = Vec::new();
    let mut x = start;
    while s(x) <= top {
        let mut y = start;
        while s(y) <= top {
            out.push(BoxSet::unconstrained(vec![
                Interval::closed(s(x), s(x + a)).unwrap(),
                Interval::closed(s(y), s(y + a)).unwrap(),
            ]).unwrap());
            y += pitch;
        }
        x += pitch;
    }
    out
}

/// Singletons at every `δ`-point of `X_{ω+1}^{(2)}` (lattice 4) in the cube
/// not covered by `pos`.
fn complement_singletons(b: Scalar, delta: Scalar, pos: &[BoxSet]) -> Vec<BoxSet> {
    let grid = Grid::new(2, b.mul_int(6), delta).unwrap();
    (0..grid.len())
        .map(|i| grid.point(i))
        .filter(|p| p.iter().any(|c| c.is_multiple_of(s(4))))
        .filter(|p| !pos.iter().any(|u| u.contains(p)))
        .map(|p| BoxSet::point(&p))
        .collect()
}

fn descent_input(b: Scalar, pos: Vec<BoxSet>, neg: Vec<BoxSet>) -> DescentInput {
    DescentInput {
        m: 1,
        k: 1,
        b,
        delta: half(),
        pos: vec![DescentFamily { label: "pos".into(), blocks: pos }],
        neg: vec![DescentFamily { label: "neg".into(), blocks: neg }],
        neg_disjointness: Scalar::inv_pow2(2),
    }
}

fn descent_controls() -> Check {
    let mut lines = Vec::new();
    for (bv, a, start) in [(4i64, 1i64, 5i64), (8, 4, 3)] {
        let b = s(bv);
        let pos = positive_family(b, start, a, a + 17);
        let neg = complement_singletons(b, half(), &pos);
        let r = partition_descent(&descent_input(b, pos.clone(), neg.clone()), DEFAULT_GUARD).map_err(err)?;
        match &r.outcome {
            Outcome::DescentComplete { .. } => {}
            o => return Err(format!("B={bv} positive control: {o:?}")),
        }
        if r.trace.len() != 2 || !r.trace.iter().all(|t| t.avoids_family) {
            return Err(format!("B={bv} positive control trace: {:?}", r.trace));
        }
        let layer = r.trace[0].layer_points;

        // dropping one singleton leaves a point no family covers
        let mut holed = neg.clone();
        holed.remove(holed.len() / 2);
        let w = partition_descent(&descent_input(b, pos.clone(), holed), DEFAULT_GUARD).map_err(err)?;
        if !matches!(w.outcome, Outcome::WitnessPoint { .. }) {
            return Err(format!("B={bv} witness control: {:?}", w.outcome));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(bv as u64);
        for _ in 0..10 {
            let mut bad = pos.clone();
            let j = rng.gen_range(0..bad.len());
            let gap = rng.gen_range(0..=15);
            let lo = bad[j].factors[0].hi + s(gap);
            let extra = BoxSet::unconstrained(vec![Interval::closed(lo, lo + s(a)).unwrap(), bad[j].factors[1].clone()]).unwrap();
            bad.push(extra);
            let last = bad.len() - 1;
            let h = partition_descent(&descent_input(b, bad, neg.clone()), DEFAULT_GUARD).map_err(err)?;
            match h.outcome {
                Outcome::HypothesisFailure { family, violated: Violated::Disjoint, evidence }
                    if family == "pos" && evidence.contains(&format!("and {last}")) => {}
                o => return Err(format!("B={bv} negative control (gap {gap}): {o:?}")),
            }
        }
        lines.push(format!("B={bv}: DescentComplete (|L'_1| = {layer}), witness and 10 seeded disjointness failures named"));
    }
    Ok(lines.join("; "))
}

// ---------------------------------------------------------------- 6

fn cube_lemma() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for t in 0..500 {
        let n = if t < 250 { 1 } else { 2 };
        let side = rng.gen_range(4..=12);
        let bricks = random_brick_cover(n, side, &mut rng).map_err(err)?;
        let cells = rasterize_bricks(&bricks, side).map_err(err)?;
        match cube_lemma_check(&cells, n).map_err(err)? {
            CubeLemmaOutcome::CommonPoint { point, members } => {
                let depth = bricks.iter().filter(|b| b.contains(&point)).count();
                if depth < n + 1 || members.len() != depth {
                    return Err(format!("cover {t}: depth {depth} at {point:?}"));
                }
            }
            o => return Err(format!("cover {t}: {o:?}")),
        }
    }
    Ok("500 covers (250 with n=1, 250 with n=2) each have a point of depth n+1".into())
}

// ---------------------------------------------------------------- 7

fn ad_lower() -> Check {
    let mut lines = Vec::new();
    for (k, n) in [(0u32, 1usize), (1, 1), (0, 2)] {
        let t = Instant::now();
        let c = ad_lower_certify(n, k, s(6), None, DEFAULT_NODE_BUDGET).map_err(err)?;
        let budget = if n == 2 { Duration::from_secs(1800) } else { Duration::from_secs(60) };
        if t.elapsed() > budget {
            return Err(format!("(k,n)=({k},{n}) took {:?}", t.elapsed()));
        }
        match c.outcome {
            coarse_core::refuter::SearchOutcome::Certified { nodes } => lines.push(format!(
                "(k,n)=({k},{n}) certified on {} points/axis, {nodes} nodes",
                c.window_steps + 1
            )),
            o => return Err(format!("(k,n)=({k},{n}): {o:?}")),
        }
    }
    Ok(format!("B=6: {}", lines.join(", ")))
}

// ---------------------------------------------------------------- 8

fn y2omega() -> Check {
    let r = 4u32;
    let window = y2omega_thin_space(6, |_| 1, s(64)).map_err(err)?;
    let b = build_y2omega_cover(r, &window, DEFAULT_GUARD).map_err(err)?;
    let bound = y2omega_family_bound(r).map_err(err)? as usize;
    let lattice = b.families.iter().filter(|f| f.provenance == Provenance::Lattice).count();
    let mut validated = 0;
    for f in b.families.iter().filter(|f| !f.is_assumed()) {
        let d = validate_disjoint(f, s(r as i64), Some(&window), DEFAULT_GUARD).map_err(err)?;
        if !d.is_ok() {
            return Err(format!("{}: {d:?}", f.label));
        }
        validated += 1;
    }
    let total = b.family_count();
    if total > bound || lattice != 14 || !b.partial {
        return Err(format!("families {total} (bound {bound}), lattice {lattice}, partial {}", b.partial));
    }
    Ok(format!(
        "{total} <= {bound} families, lattice part 14, {validated} validated 4-disjoint on the thin window, {} assumed, marked partial",
        total - validated
    ))
}

// ---------------------------------------------------------------- 9

fn x_omega_g() -> Check {
    let g: Vec<usize> = (1..=64).collect();
    let mut lines = Vec::new();
    for r in [2u32, 3] {
        let dec = build_x_omega_g(&g, r, DEFAULT_GUARD).map_err(err)?;
        let d = validate_disjoint(&dec.singletons, s(r as i64), Some(&dec.space), DEFAULT_GUARD).map_err(err)?;
        if !d.is_ok() {
            return Err(format!("r={r}: {d:?}"));
        }
        let blocks = match &dec.remainder.kind {
            SpaceKind::AsUnion { blocks, .. } => blocks,
            _ => return Err(format!("r={r}: remainder is not an asymptotic union")),
        };
        let finite = blocks.iter().all(|b| matches!(b.kind, SpaceKind::LatticePower { .. }));
        if !finite || blocks.len() != dec.threshold - 1 || dec.remainder_max_dim != dec.threshold - 1 {
            return Err(format!("r={r}: remainder has {} blocks, max dim {}", blocks.len(), dec.remainder_max_dim));
        }
        lines.push(format!(
            "r={r}: {} singletons r-disjoint, remainder blocks 1..{} of dim <= {}",
            dec.singletons.prototype_count(),
            dec.threshold - 1,
            dec.remainder_max_dim
        ));
    }
    Ok(lines.join("; "))
}

// ---------------------------------------------------------------- 10

fn metric_axioms() -> Check {
    let space = SpaceSpec::as_union(
        2,
        vec![
            SpaceSpec::lattice_power(s(1), 1, s(8), s(1)).map_err(err)?,
            SpaceSpec::lattice_power(s(2), 2, s(8), s(1)).map_err(err)?,
            SpaceSpec::deviating(3, 1, 1, s(8), half()).map_err(err)?,
        ],
    )
    .map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for t in 0..10_000 {
        let x = sample_window_point(&space, &mut rng).map_err(err)?;
        let y = sample_window_point(&space, &mut rng).map_err(err)?;
        let z = sample_window_point(&space, &mut rng).map_err(err)?;
        let d = |a: &TaggedPoint, b: &TaggedPoint| asunion_distance(a, b, &space).map_err(err);
        let (xy, yx, yz, xz) = (d(&x, &y)?, d(&y, &x)?, d(&y, &z)?, d(&x, &z)?);
        if xy != yx || xz > xy + yz || !d(&x, &x)?.is_zero() || (x != y && !xy.is_positive()) {
            return Err(format!("triple {t}: {x:?} {y:?} {z:?}"));
        }
    }
    Ok("10000 triples: symmetric, triangle inequality, identity of indiscernibles".into())
}

fn main() -> ExitCode {
    let criteria: Vec<(usize, &str, u64, fn() -> Check)> = vec![
        (1, "two-family cover", 360, two_family_covers),
        (2, "inductive cover", 300, inductive_covers),
        (3, "epsilon-partition invariants", 120, epsilon_partitions),
        (4, "nested partitions nonempty", 120, nested_chains),
        (5, "descent refuter controls", 180, descent_controls),
        (6, "cube lemma", 120, cube_lemma),
        (7, "ad lower bound search", 1920, ad_lower),
        (8, "ad upper bound bundle", 300, y2omega),
        (9, "X_omega(g) decomposition", 60, x_omega_g),
        (10, "metric axioms", 60, metric_axioms),
    ];
    println!("acceptance: exact arithmetic, zero tolerance");
    let mut failed = Vec::new();
    for (id, title, budget, f) in criteria {
        let t = Instant::now();
        let res = f();
        let took = t.elapsed();
        let over = took > Duration::from_secs(budget);
        match (&res, over) {
            (Ok(d), false) => println!("criterion {id:>2} PASS  {title}: {d} [{:.1}s <= {budget}s]", took.as_secs_f64()),
            (Ok(d), true) => {
                println!("criterion {id:>2} FAIL  {title}: over budget, {d} [{:.1}s > {budget}s]", took.as_secs_f64());
                failed.push(id);
            }
            (Err(e), _) => {
                println!("criterion {id:>2} FAIL  {title}: {e} [{:.1}s]", took.as_secs_f64());
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: 10/10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
