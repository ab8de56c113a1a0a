//! Lower bounds `ad_{(2^kℤ)^n}(2^{k+1}) ≥ n`.
//!
//! Everything is done on the index lattice `ℤ^n` (coordinates divided by
//! `2^k`), where a ball of radius `2^{k+1}` becomes the king neighbourhood of
//! radius 1 and the mesh bound `B` becomes `D = ⌊B/2^k⌋`.
//!
//! A cover with Lebesgue number `≥ 2^{k+1}` can be shrunk to the cores
//! `{x : ball(x) ⊆ U}`; assigning each point to one core and replacing `U` by
//! the neighbourhood of its core keeps every property. So the search runs
//! over partitions of the window into cores.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::BoxSet;
use crate::scalar::Scalar;
use crate::spaces::{CellSet, Grid};

use super::cube_lemma::{cube_lemma_check, CubeLemmaOutcome};

/// Largest dimension the exhaustive search accepts.
pub const MAX_SEARCH_DIM: usize = 2;
/// Largest window, in lattice points per axis.
pub const MAX_WINDOW_POINTS: usize = 15;
/// Default node budget of the search.
pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum SearchOutcome {
    /// No window cover exists.
    Certified { nodes: u64 },
    /// A window cover: the cores, in lattice coordinates.
    CoverFound { cores: Vec<Vec<Vec<i64>>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdLowerCertificate {
    pub n: usize,
    pub k: u32,
    pub b: Scalar,
    /// Mesh bound in lattice steps.
    pub mesh_steps: usize,
    /// The window is `[0, window_steps·2^k]^n`.
    pub window_steps: usize,
    pub outcome: SearchOutcome,
}

impl AdLowerCertificate {
    pub fn certified(&self) -> bool {
        matches!(self.outcome, SearchOutcome::Certified { .. })
    }
}

struct Search {
    n: usize,
    max_depth: usize,
    memo: bool,
    side: usize,
    mesh: usize,
    coords: Vec<Vec<usize>>,
    /// Window points at king distance ≤ 1, including the point itself.
    ball: Vec<Vec<usize>>,
    labels: Vec<usize>,
    bbox: Vec<(Vec<usize>, Vec<usize>)>,
    /// Points before `p − reach` can no longer affect a depth check.
    reach: usize,
    /// Canonical encodings of partial assignments known to fail.
    failed: HashSet<Vec<u8>>,
    pending: Vec<Vec<u8>>,
    nodes: u64,
    budget: u64,
}

impl Search {
    fn new(n: usize, max_depth: usize, side: usize, mesh: usize, budget: u64) -> Self {
        let per = side + 1;
        let total = per.pow(n as u32);
        let coords: Vec<Vec<usize>> = (0..total)
            .map(|mut i| {
                let mut c = vec![0; n];
                for a in (0..n).rev() {
                    c[a] = i % per;
                    i /= per;
                }
                c
            })
            .collect();
        let ball = coords
            .iter()
            .map(|c| {
                (0..total)
                    .filter(|&j| coords[j].iter().zip(c).all(|(&a, &b)| a.abs_diff(b) <= 1))
                    .collect()
            })
            .collect();
        let reach = 2 * (0..n).map(|a| per.pow(a as u32)).sum::<usize>();
        Search {
            n,
            max_depth,
            memo: true,
            side,
            mesh,
            coords,
            ball,
            labels: Vec::with_capacity(total),
            bbox: Vec::new(),
            reach,
            failed: HashSet::new(),
            pending: Vec::new(),
            nodes: 0,
            budget,
        }
    }

    /// Labels of the points still within reach of `p`, in order of first
    /// appearance.
    fn frontier_labels(&self, p: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for &l in &self.labels[p.saturating_sub(self.reach)..p] {
            if !out.contains(&l) {
                out.push(l);
            }
        }
        out
    }

    /// Encodes everything the rest of the search depends on, up to renaming
    /// of labels: the labels within reach and the boxes of their cores. The
    /// upper end of a box on axis 0 is left out; later points never lower it.
    fn state_key(&self, p: usize, frontier: &[usize]) -> Vec<u8> {
        let start = p.saturating_sub(self.reach);
        let mut key = Vec::with_capacity(2 * self.reach + 4 * frontier.len() + 2);
        key.extend((p as u16).to_le_bytes());
        for &l in &self.labels[start..p] {
            key.push(frontier.iter().position(|&f| f == l).expect("label within reach") as u8);
        }
        for &l in frontier {
            let (lo, hi) = &self.bbox[l];
            key.extend(lo.iter().map(|&v| v as u8));
            key.extend(hi[1..].iter().map(|&v| v as u8));
        }
        key
    }

    fn nbhd_extent_ok(&self, lo: &[usize], hi: &[usize]) -> bool {
        lo.iter().zip(hi).all(|(&l, &h)| (h + 1).min(self.side) - l.saturating_sub(1) <= self.mesh)
    }

    /// Depth of every point whose ball contains `p`, counting assigned
    /// points only.
    fn depth_ok(&self, p: usize) -> bool {
        let mut seen = Vec::with_capacity(9);
        for &y in &self.ball[p] {
            seen.clear();
            for &z in &self.ball[y] {
                if z < self.labels.len() && !seen.contains(&self.labels[z]) {
                    seen.push(self.labels[z]);
                    if seen.len() > self.max_depth {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn run(&mut self) -> Result<bool> {
        let p = self.labels.len();
        if p == self.coords.len() {
            return Ok(true);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::GuardExceeded { what: "cover search nodes".into(), estimate: self.nodes as u128, limit: self.budget as u128 });
        }
        // Cores may be taken 2-connected under king adjacency: splitting a
        // core where its parts are 3 apart changes no depth. A core with no
        // point within reach is then closed for good.
        let candidates: Vec<usize> = if self.memo {
            let frontier = self.frontier_labels(p);
            let key = self.state_key(p, &frontier);
            if self.failed.contains(&key) {
                return Ok(false);
            }
            self.pending.push(key);
            frontier.into_iter().chain([self.bbox.len()]).collect()
        } else {
            (0..=self.bbox.len()).collect()
        };
        let c = self.coords[p].clone();
        for label in candidates {
            let fresh = label == self.bbox.len();
            let saved = if fresh {
                self.bbox.push((c.clone(), c.clone()));
                None
            } else {
                let old = self.bbox[label].clone();
                let (lo, hi) = &mut self.bbox[label];
                for a in 0..self.n {
                    lo[a] = lo[a].min(c[a]);
                    hi[a] = hi[a].max(c[a]);
                }
                Some(old)
            };
            self.labels.push(label);
            let (lo, hi) = &self.bbox[label];
            if self.nbhd_extent_ok(lo, hi) && self.depth_ok(p) && self.run()? {
                self.pending.clear();
                return Ok(true);
            }
            self.labels.pop();
            match saved {
                None => {
                    self.bbox.pop();
                }
                Some(old) => self.bbox[label] = old,
            }
        }
        if self.memo {
            let key = self.pending.pop().expect("key pushed on entry");
            self.failed.insert(key);
        }
        Ok(false)
    }
}

/// Mesh bound in lattice steps.
pub fn mesh_steps(k: u32, b: Scalar) -> Result<usize> {
    if b.is_negative() {
        return Err(Error::invalid("negative mesh bound"));
    }
    Ok(b.div_floor(Scalar::pow2(k)) as usize)
}

/// Exhaustive search for a cover of `(2^kℤ)^n` with Lebesgue number
/// `≥ 2^{k+1}`, multiplicity `≤ n` and mesh `≤ B`, restricted to the window
/// `[0, W·2^k]^n` with `W ≥ D+2` lattice steps (default `D+2`). Finding none
/// certifies `ad(2^{k+1}) ≥ n` for covers of mesh at most `B`.
pub fn ad_lower_certify(n: usize, k: u32, b: Scalar, window_steps: Option<usize>, budget: u64) -> Result<AdLowerCertificate> {
    if n == 0 || n > MAX_SEARCH_DIM {
        return Err(Error::invalid(format!("search dimension must be in 1..={MAX_SEARCH_DIM}, got {n}")));
    }
    let mesh = mesh_steps(k, b)?;
    let side = window_steps.unwrap_or(mesh + 2);
    if side < mesh + 2 {
        return Err(Error::invalid(format!("window of {side} steps is smaller than mesh + 2 = {}", mesh + 2)));
    }
    if side + 1 > MAX_WINDOW_POINTS {
        return Err(Error::GuardExceeded { what: "window points per axis".into(), estimate: side as u128 + 1, limit: MAX_WINDOW_POINTS as u128 });
    }
    let mut search = Search::new(n, n, side, mesh, budget);
    let found = search.run()?;
    let outcome = if found {
        let mut cores: Vec<Vec<Vec<i64>>> = vec![Vec::new(); search.bbox.len()];
        for (p, &l) in search.labels.iter().enumerate() {
            cores[l].push(search.coords[p].iter().map(|&v| v as i64).collect());
        }
        SearchOutcome::CoverFound { cores }
    } else {
        SearchOutcome::Certified { nodes: search.nodes }
    };
    Ok(AdLowerCertificate { n, k, b, mesh_steps: mesh, window_steps: side, outcome })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdRefuteReport {
    /// Every window point's `2^{k+1}`-ball lies in a member.
    pub lebesgue_ok: bool,
    pub multiplicity: usize,
    pub mesh_ok: bool,
    /// Members whose core meets the window.
    pub kept_members: Vec<usize>,
    pub cube: CubeLemmaOutcome,
    /// Lattice point of depth `≥ n+1`, in real coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_depth: Option<usize>,
}

/// Runs the shrink, restrict, fatten and cube-lemma pipeline on a concrete
/// cover of `(2^kℤ)^n`, given by members that must cover the window
/// `[−2^{k+1}, (D+4)·2^k]^n`.
pub fn ad_lower_refute(n: usize, k: u32, b: Scalar, members: &[BoxSet], guard: u128) -> Result<AdRefuteReport> {
    if n == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if let Some(m) = members.iter().find(|m| m.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: m.dim() });
    }
    let step = Scalar::pow2(k);
    let mesh = mesh_steps(k, b)?;
    let side = mesh + 2;
    // extended window [−2, side+2] in lattice steps
    let ext = side + 5;
    let total = (ext as u128).saturating_pow(n as u32);
    let half_total = ((2 * side + 1) as u128).saturating_pow(n as u32);
    if total.saturating_mul(members.len() as u128 + 1) > guard || half_total > guard {
        return Err(Error::GuardExceeded { what: "refute pipeline".into(), estimate: total * (members.len() as u128 + 1), limit: guard });
    }
    let total = total as usize;
    let ext_coords = |mut i: usize| -> Vec<i64> {
        let mut c = vec![0i64; n];
        for v in c.iter_mut() {
            *v = (i % ext) as i64 - 2;
            i /= ext;
        }
        c
    };
    let ext_index = |c: &[i64]| -> usize { c.iter().rev().fold(0, |acc, &v| acc * ext + (v + 2) as usize) };
    let real = |c: &[i64]| -> Vec<Scalar> { c.iter().map(|&v| step.mul_int(v as i128)).collect() };
    let in_window = |c: &[i64]| c.iter().all(|&v| (0..=side as i64).contains(&v));

    let table: Vec<Vec<bool>> = members
        .iter()
        .map(|m| (0..total).map(|i| m.contains(&real(&ext_coords(i)))).collect())
        .collect();
    let ball = |c: &[i64]| -> Vec<usize> {
        let mut out = vec![ext_index(c)];
        for a in 0..n {
            let mut next = Vec::with_capacity(out.len() * 3);
            for &i in &out {
                let mut cc = ext_coords(i);
                for dv in [-1i64, 1] {
                    cc[a] += dv;
                    next.push(ext_index(&cc));
                    cc[a] -= dv;
                }
                next.push(i);
            }
            out = next;
        }
        out
    };

    let window_points: Vec<Vec<i64>> = (0..total).map(ext_coords).filter(|c| in_window(c)).collect();
    let mut lebesgue_ok = true;
    let mut multiplicity = 0;
    let mut cores: Vec<Vec<Vec<i64>>> = vec![Vec::new(); members.len()];
    for c in &window_points {
        let i = ext_index(c);
        multiplicity = multiplicity.max(table.iter().filter(|t| t[i]).count());
        let bl = ball(c);
        let mut any = false;
        for (j, t) in table.iter().enumerate() {
            if bl.iter().all(|&z| t[z]) {
                cores[j].push(c.clone());
                any = true;
            }
        }
        lebesgue_ok &= any;
    }
    let mut mesh_ok = true;
    for t in &table {
        let pts: Vec<Vec<i64>> = (0..total).filter(|&i| t[i]).map(ext_coords).collect();
        for a in 0..n {
            let (lo, hi) = pts.iter().fold((i64::MAX, i64::MIN), |(l, h), p| (l.min(p[a]), h.max(p[a])));
            if !pts.is_empty() && (hi - lo) as usize > mesh {
                mesh_ok = false;
            }
        }
    }

    let kept: Vec<usize> = (0..members.len()).filter(|&j| !cores[j].is_empty()).collect();
    let half = Grid::new(n, Scalar::from(side as i64), Scalar::inv_pow2(1))?;
    let fattened: Vec<CellSet> = kept
        .iter()
        .map(|&j| {
            let core = CellSet::from_indices(
                &half,
                cores[j].iter().map(|c| half.index(&c.iter().map(|&v| 2 * v as usize).collect::<Vec<_>>())),
            );
            core.closed_neighborhood(Scalar::inv_pow2(1))
        })
        .collect();
    let cube = if fattened.is_empty() {
        CubeLemmaOutcome::Uncovered { point: vec![Scalar::ZERO; n] }
    } else {
        cube_lemma_check(&fattened, n)?
    };
    let (witness, witness_depth) = match &cube {
        CubeLemmaOutcome::CommonPoint { point, .. } => {
            // nearest lattice point, rounding half-integers down
            let y: Vec<i64> = point.iter().map(|v| v.div_floor(Scalar::ONE) as i64).collect();
            let i = ext_index(&y);
            let depth = table.iter().filter(|t| t[i]).count();
            (Some(real(&y)), Some(depth))
        }
        _ => (None, None),
    };
    let cube = match cube {
        CubeLemmaOutcome::CommonPoint { point, members: ms } => CubeLemmaOutcome::CommonPoint {
            point: point.iter().map(|&v| v * step).collect(),
            members: ms.iter().map(|&m| kept[m]).collect(),
        },
        CubeLemmaOutcome::Uncovered { point } => CubeLemmaOutcome::Uncovered { point: point.iter().map(|&v| v * step).collect() },
        CubeLemmaOutcome::FaceSpanningMember { member, axis } => CubeLemmaOutcome::FaceSpanningMember { member: kept[member], axis },
        s => s,
    };
    Ok(AdRefuteReport { lebesgue_ok, multiplicity, mesh_ok, kept_members: kept, cube, witness, witness_depth })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GTildeStep {
    pub k: u32,
    /// Lattice radius of the `r`-ball, `⌈r/2^k⌉ − 1`.
    pub rho: u64,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GTildeReport {
    pub r: u64,
    pub g: usize,
    /// Largest certified `k`, if any.
    pub k: Option<u32>,
    pub mesh_steps: usize,
    pub steps: Vec<GTildeStep>,
}

/// Mesh, in lattice steps, used by [`g_tilde_exact`].
pub const G_TILDE_MESH_STEPS: usize = 6;

/// Largest `k ≤ k_max` with `ad_{(2^kℤ)^g}(r) ≥ g` certified by the search.
///
/// At scale `2^k` the `r`-ball is the lattice ball of radius
/// `ρ = ⌈r/2^k⌉ − 1`. For `ρ = 0` singletons cover with multiplicity 1, so
/// `ad = 0`. For `ρ ≥ 1` the condition is at least as strong as at `ρ = 1`,
/// which is what the search certifies.
pub fn g_tilde_exact(r: u64, g: usize, k_max: u32, budget: u64) -> Result<GTildeReport> {
    if r == 0 {
        return Err(Error::invalid("r must be positive"));
    }
    if g > MAX_SEARCH_DIM {
        return Err(Error::invalid(format!("exact evaluation supports g <= {MAX_SEARCH_DIM}, got {g}")));
    }
    let mut cache: HashMap<usize, bool> = HashMap::new();
    let mut steps = Vec::new();
    let mut best = None;
    for k in (0..=k_max).rev() {
        let scale = 1u64.checked_shl(k).ok_or_else(|| Error::invalid("k too large"))?;
        let rho = r.div_ceil(scale) - 1;
        let certified = if g == 0 {
            true
        } else if rho == 0 {
            false
        } else {
            match cache.get(&g) {
                Some(&c) => c,
                None => {
                    let b = Scalar::from(G_TILDE_MESH_STEPS as i64);
                    let c = ad_lower_certify(g, 0, b, None, budget)?.certified();
                    cache.insert(g, c);
                    c
                }
            }
        };
        steps.push(GTildeStep { k, rho, certified });
        if certified {
            best = Some(k);
            break;
        }
    }
    Ok(GTildeReport { r, g, k: best, mesh_steps: G_TILDE_MESH_STEPS, steps })
}
