//! Projection systems: sites with an overlap relation, projection distances and an
//! ambient metric. Checks the Behrstock inequality, the bounded geodesic image
//! property and the persistence of large projections along sequences of sites.

use crate::error::{invalid, Result};
use crate::farey::{
    annular_distance, annular_projection, conjugator, farey_distance, farey_geodesic, oracle::BoundedFarey,
    random_slope, twist_about, Slope,
};
use crate::rng::{self, Rng};
use crate::serde_big;
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt::Debug;

pub type Rational = Ratio<i64>;

/// Bounded geodesic image constant `m`, Behrstock constant `b`, twist growth `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constants {
    pub m: u64,
    pub b: u64,
    #[serde(with = "serde_big::ratio")]
    pub c: Rational,
}

impl Constants {
    /// Threshold on interior projections for persistence: `M + 3B`.
    pub fn persistence_threshold(&self) -> u64 {
        self.m + 3 * self.b
    }

    /// Threshold for sequences whose consecutive terms may fail to overlap: `M + 6B`.
    pub fn general_threshold(&self) -> u64 {
        self.m + 6 * self.b
    }
}

pub trait ProjectionSystem {
    type Site: Clone + Eq + Ord + Debug + Serialize;

    /// Symmetric and irreflexive.
    fn overlaps(&self, x: &Self::Site, y: &Self::Site) -> bool;

    /// `d_y(a, b)`; `None` when `a` or `b` has empty projection to `y`.
    fn proj_dist(&self, y: &Self::Site, a: &Self::Site, b: &Self::Site) -> Option<u64>;

    fn ambient_dist(&self, a: &Self::Site, b: &Self::Site) -> u64;

    fn ambient_geodesic(&self, a: &Self::Site, b: &Self::Site) -> Vec<Self::Site>;

    fn constants(&self) -> Constants;
}

/// Annuli in the torus. Sites are slopes, distinct slopes always overlap, and
/// projection distance is annular distance.
#[derive(Clone, Debug)]
pub struct TorusAnnuli {
    pub constants: Constants,
}

impl TorusAnnuli {
    /// Values found by [`estimate_torus_constants`] and frozen here.
    pub const DEFAULT_CONSTANTS: Constants = Constants { m: 4, b: 2, c: Ratio::new_raw(1, 1) };

    pub fn new(constants: Constants) -> Self {
        TorusAnnuli { constants }
    }
}

impl Default for TorusAnnuli {
    fn default() -> Self {
        Self::new(Self::DEFAULT_CONSTANTS)
    }
}

impl ProjectionSystem for TorusAnnuli {
    type Site = Slope;

    fn overlaps(&self, x: &Slope, y: &Slope) -> bool {
        x != y
    }

    fn proj_dist(&self, y: &Slope, a: &Slope, b: &Slope) -> Option<u64> {
        annular_distance(y, a, b).ok()
    }

    fn ambient_dist(&self, a: &Slope, b: &Slope) -> u64 {
        farey_distance(a, b)
    }

    fn ambient_geodesic(&self, a: &Slope, b: &Slope) -> Vec<Slope> {
        farey_geodesic(a, b)
    }

    fn constants(&self) -> Constants {
        self.constants
    }
}

/// A finite projection system stored as explicit tables.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SyntheticSystem {
    pub sites: Vec<String>,
    pub overlap: Vec<Vec<bool>>,
    pub ambient: Vec<Vec<u64>>,
    /// `proj[y][a][b]` is `d_y(a, b)`.
    pub proj: Vec<Vec<Vec<Option<u64>>>>,
    pub constants: Constants,
}

impl SyntheticSystem {
    pub fn validate(&self) -> Result<()> {
        let n = self.sites.len();
        fn square<T>(rows: &[Vec<T>], n: usize) -> bool {
            rows.len() == n && rows.iter().all(|r| r.len() == n)
        }
        let proj_ok = self.proj.len() == n && self.proj.iter().all(|m| m.len() == n && m.iter().all(|r| r.len() == n));
        if !square(&self.overlap, n) || !square(&self.ambient, n) || !proj_ok {
            return Err(invalid("synthetic system tables do not match the site count"));
        }
        for i in 0..n {
            if self.overlap[i][i] || self.ambient[i][i] != 0 {
                return Err(invalid(format!("site {i} overlaps itself or has nonzero self-distance")));
            }
            for j in 0..n {
                if self.overlap[i][j] != self.overlap[j][i] || self.ambient[i][j] != self.ambient[j][i] {
                    return Err(invalid(format!("tables not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let sys: SyntheticSystem = serde_json::from_str(s).map_err(|e| invalid(format!("synthetic system: {e}")))?;
        sys.validate()?;
        Ok(sys)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tables serialize")
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

impl ProjectionSystem for SyntheticSystem {
    type Site = usize;

    fn overlaps(&self, x: &usize, y: &usize) -> bool {
        self.overlap[*x][*y]
    }

    fn proj_dist(&self, y: &usize, a: &usize, b: &usize) -> Option<u64> {
        self.proj[*y][*a][*b]
    }

    fn ambient_dist(&self, a: &usize, b: &usize) -> u64 {
        self.ambient[*a][*b]
    }

    fn ambient_geodesic(&self, a: &usize, b: &usize) -> Vec<usize> {
        let mut path = vec![*a];
        let mut cur = *a;
        while cur != *b {
            let d = self.ambient[cur][*b];
            cur = (0..self.len())
                .find(|&v| self.ambient[cur][v] == 1 && self.ambient[v][*b] + 1 == d)
                .expect("ambient metric is a graph metric");
            path.push(cur);
        }
        path
    }

    fn constants(&self) -> Constants {
        self.constants
    }
}

/// Parameters for a synthetic system grown from a hidden tree.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SyntheticSpec {
    /// Length of the spine path that carries the test sequence.
    pub spine: usize,
    /// Extra vertices hung at random off earlier vertices.
    pub extra: usize,
    /// Minimum projection distance across each spine vertex.
    pub threshold: u64,
    /// Range of spine steps between consecutive sequence terms.
    pub min_step: usize,
    pub max_step: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SyntheticInstance {
    pub system: SyntheticSystem,
    pub sequence: Vec<usize>,
}

/// Build a projection system from a random tree. Sites are tree vertices, two
/// sites overlap when they are at tree distance at least 2, the ambient metric is
/// the tree metric, and a site `x` projects to `v` as the link coordinate of the
/// first edge from `v` towards `x`, widened by one when `d(v, x)` is odd.
///
/// Link coordinates of distinct edges at a vertex differ by at least 2, so the
/// Behrstock inequality holds with `B = 2` and bounded geodesic image with `M = 1`.
pub fn synthetic_instance(spec: SyntheticSpec, seed: u64) -> Result<SyntheticInstance> {
    if spec.spine < 2 || spec.min_step == 0 || spec.min_step > spec.max_step {
        return Err(invalid("synthetic spec needs spine ≥ 2 and 1 ≤ min_step ≤ max_step"));
    }
    let mut r = rng::seeded(seed);
    let n = spec.spine + spec.extra;
    let mut adj = vec![Vec::new(); n];
    for i in 1..spec.spine {
        adj[i - 1].push(i);
        adj[i].push(i - 1);
    }
    for v in spec.spine..n {
        let u = r.random_range(0..v);
        adj[u].push(v);
        adj[v].push(u);
    }
    // coord[v][k] is the link coordinate of the edge from v to adj[v][k].
    let half = spec.threshold.div_ceil(2) as i64;
    let coord: Vec<Vec<i64>> = (0..n)
        .map(|v| {
            let deg = adj[v].len();
            let mut slots: Vec<i64> = (0..deg as i64).map(|k| 2 * k).collect();
            slots.shuffle(&mut r);
            let mut c: Vec<i64> = slots;
            if v > 0 && v + 1 < spec.spine {
                // Spine neighbours sit far apart; the rest go below them.
                let wide = 2 * (half + r.random_range(0..=3));
                for (k, &u) in adj[v].iter().enumerate() {
                    c[k] = if u == v - 1 {
                        0
                    } else if u == v + 1 {
                        wide
                    } else {
                        -2 * (k as i64 + 1)
                    };
                }
            }
            c
        })
        .collect();
    // Tree distances and first steps.
    let mut dist = vec![vec![0u64; n]; n];
    let mut first = vec![vec![usize::MAX; n]; n];
    for s in 0..n {
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut q = VecDeque::new();
        for (k, &u) in adj[s].iter().enumerate() {
            seen[u] = true;
            dist[s][u] = 1;
            first[s][u] = k;
            q.push_back(u);
        }
        while let Some(u) = q.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    dist[s][w] = dist[s][u] + 1;
                    first[s][w] = first[s][u];
                    q.push_back(w);
                }
            }
        }
    }
    let proj_set = |y: usize, x: usize| -> Option<(i64, i64)> {
        if dist[y][x] < 2 {
            return None;
        }
        let c = coord[y][first[y][x]];
        Some((c, c + (dist[y][x] % 2) as i64))
    };
    let proj = (0..n)
        .map(|y| {
            (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| {
                            let (pa, pb) = (proj_set(y, a)?, proj_set(y, b)?);
                            Some((pa.1.max(pb.1) - pa.0.min(pb.0)) as u64)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let system = SyntheticSystem {
        sites: (0..n).map(|i| format!("v{i}")).collect(),
        overlap: (0..n).map(|i| (0..n).map(|j| dist[i][j] >= 2).collect()).collect(),
        ambient: dist,
        proj,
        constants: Constants { m: 1, b: 2, c: Ratio::from_integer(1) },
    };
    let mut sequence = vec![0];
    loop {
        let next = sequence.last().unwrap() + r.random_range(spec.min_step..=spec.max_step);
        if next >= spec.spine {
            break;
        }
        sequence.push(next);
    }
    Ok(SyntheticInstance { system, sequence })
}

#[derive(Clone, Debug, Serialize)]
pub struct BehrstockWitness<S> {
    pub x: S,
    pub y: S,
    pub z: S,
    pub d_y_xz: u64,
    pub d_x_yz: u64,
    pub d_z_xy: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BehrstockReport<S> {
    pub b: u64,
    pub triples: u64,
    /// Triples skipped because some pair fails to overlap.
    pub skipped: u64,
    pub violations: u64,
    pub first_violation: Option<BehrstockWitness<S>>,
    /// Least `B` with no violation on the scanned triples.
    pub b_emp: u64,
}

/// Scan triples for violations of `d_Y(X,Z) ≥ B ⇒ max(d_X(Y,Z), d_Z(X,Y)) < B`,
/// with each member of the triple taking the role of `Y` in turn.
pub fn behrstock_scan<P: ProjectionSystem>(
    sys: &P,
    triples: &[(P::Site, P::Site, P::Site)],
    b: u64,
) -> BehrstockReport<P::Site> {
    let mut rep = BehrstockReport { b, triples: 0, skipped: 0, violations: 0, first_violation: None, b_emp: 0 };
    let mut worst = None::<u64>;
    for (p, q, s) in triples {
        rep.triples += 1;
        if !(sys.overlaps(p, q) && sys.overlaps(q, s) && sys.overlaps(p, s)) {
            rep.skipped += 1;
            continue;
        }
        let mut violated = false;
        for (x, y, z) in [(p, q, s), (q, s, p), (s, p, q)] {
            let (Some(dy), Some(dx), Some(dz)) =
                (sys.proj_dist(y, x, z), sys.proj_dist(x, y, z), sys.proj_dist(z, x, y))
            else {
                continue;
            };
            let v = dy.min(dx.max(dz));
            worst = Some(worst.map_or(v, |w| w.max(v)));
            if v >= b && !violated {
                violated = true;
                rep.violations += 1;
                if rep.first_violation.is_none() {
                    rep.first_violation = Some(BehrstockWitness {
                        x: x.clone(),
                        y: y.clone(),
                        z: z.clone(),
                        d_y_xz: dy,
                        d_x_yz: dx,
                        d_z_xy: dz,
                    });
                }
            }
        }
    }
    rep.b_emp = worst.map_or(0, |w| w + 1);
    rep
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum BgitOutcome<S> {
    /// Every vertex projects; diameter of the union of their projections.
    Projects { diameter: u64 },
    /// First vertex with empty projection.
    Blocked { index: usize, vertex: S },
}

/// Project a geodesic to site `y`.
pub fn bgit_scan<P: ProjectionSystem>(sys: &P, y: &P::Site, geodesic: &[P::Site]) -> BgitOutcome<P::Site> {
    for (i, v) in geodesic.iter().enumerate() {
        if sys.proj_dist(y, v, v).is_none() {
            return BgitOutcome::Blocked { index: i, vertex: v.clone() };
        }
    }
    let mut diameter = 0;
    for (i, u) in geodesic.iter().enumerate() {
        for v in &geodesic[i..] {
            diameter = diameter.max(sys.proj_dist(y, u, v).unwrap());
        }
    }
    BgitOutcome::Projects { diameter }
}

#[derive(Clone, Debug, Serialize)]
pub struct PersistenceReport<S> {
    pub sequence: Vec<S>,
    pub m: u64,
    pub b: u64,
    /// Consecutive terms overlap and each interior `d_{Y_j}(Y_{j−1}, Y_{j+1}) ≥ M + 3B`.
    pub hypothesis_ok: bool,
    pub pairwise_overlap_ok: bool,
    /// `d_{Y_j}(Y_i, Y_k) ≥ M + B` for all `i < j < k`.
    pub middle_bound_ok: bool,
    /// `d_S(Y_i, Y_l) ≥ d_S(Y_j, Y_k)` whenever `i ≤ j < k ≤ l`.
    pub monotone_ok: bool,
    /// `d_S(Y_1, Y_n) ≥ n − 1`, checked only when every consecutive gap is at least 3.
    pub final_distance_ok: Option<bool>,
    /// Triple `(i, j, k)` with the smallest middle projection, and that value.
    pub weakest_middle: Option<(usize, usize, usize, u64)>,
    pub conclusions_ok: bool,
}

pub fn persistence_check<P: ProjectionSystem>(sys: &P, seq: &[P::Site], m: u64, b: u64) -> PersistenceReport<P::Site> {
    let n = seq.len();
    let mut hypothesis_ok = seq.windows(2).all(|w| sys.overlaps(&w[0], &w[1]));
    for w in seq.windows(3) {
        hypothesis_ok &= sys.proj_dist(&w[1], &w[0], &w[2]).is_some_and(|d| d >= m + 3 * b);
    }
    let mut pairwise_overlap_ok = true;
    for i in 0..n {
        for j in i + 1..n {
            pairwise_overlap_ok &= sys.overlaps(&seq[i], &seq[j]);
        }
    }
    let mut middle_bound_ok = true;
    let mut weakest: Option<(usize, usize, usize, u64)> = None;
    for j in 1..n.saturating_sub(1) {
        for i in 0..j {
            for k in j + 1..n {
                let v = sys.proj_dist(&seq[j], &seq[i], &seq[k]);
                let val = v.unwrap_or(0);
                middle_bound_ok &= v.is_some_and(|d| d >= m + b);
                if weakest.is_none_or(|w| val < w.3) {
                    weakest = Some((i, j, k, val));
                }
            }
        }
    }
    let d: Vec<Vec<u64>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { 0 } else { sys.ambient_dist(&seq[i], &seq[j]) }).collect()).collect();
    let mut monotone_ok = true;
    for i in 0..n {
        for l in i + 1..n {
            if l > i + 1 {
                monotone_ok &= d[i][l] >= d[i + 1][l] && d[i][l] >= d[i][l - 1];
            }
        }
    }
    let final_distance_ok = (n >= 2 && (0..n - 1).all(|i| d[i][i + 1] >= 3)).then(|| d[0][n - 1] >= (n - 1) as u64);
    let conclusions_ok = pairwise_overlap_ok && middle_bound_ok && monotone_ok && final_distance_ok != Some(false);
    PersistenceReport {
        sequence: seq.to_vec(),
        m,
        b,
        hypothesis_ok,
        pairwise_overlap_ok,
        middle_bound_ok,
        monotone_ok,
        final_distance_ok,
        weakest_middle: weakest,
        conclusions_ok,
    }
}

/// `ι(j)`: the largest `i < j` with `Y_i ⋔ Y_j`; `τ(j)`: the smallest `k > j`.
pub fn overlap_neighbours<P: ProjectionSystem>(sys: &P, seq: &[P::Site]) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let n = seq.len();
    let iota = (0..n).map(|j| (0..j).rev().find(|&i| sys.overlaps(&seq[i], &seq[j]))).collect();
    let tau = (0..n).map(|j| (j + 1..n).find(|&k| sys.overlaps(&seq[j], &seq[k]))).collect();
    (iota, tau)
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneralPersistenceReport<S> {
    pub iota: Vec<Option<usize>>,
    pub tau: Vec<Option<usize>>,
    /// `d_{Y_j}(Y_{ι(j)}, Y_{τ(j)}) ≥ M + 6B` wherever both exist.
    pub hypothesis_ok: bool,
    /// For every `i < j < k` joined by chains of consecutively overlapping terms,
    /// `d_{Y_j}(Y_i, Y_k) ≥ M + 3B`.
    pub interior_ok: bool,
    /// Indices of the chain `0, τ(0), τ(τ(0)), …`.
    pub chain: Vec<usize>,
    pub chain_report: PersistenceReport<S>,
    pub conclusions_ok: bool,
}

pub fn general_persistence_check<P: ProjectionSystem>(
    sys: &P,
    seq: &[P::Site],
    m: u64,
    b: u64,
) -> GeneralPersistenceReport<P::Site> {
    let n = seq.len();
    let (iota, tau) = overlap_neighbours(sys, seq);
    let mut hypothesis_ok = true;
    for j in 0..n {
        if let (Some(i), Some(k)) = (iota[j], tau[j]) {
            hypothesis_ok &= sys.proj_dist(&seq[j], &seq[i], &seq[k]).is_some_and(|d| d >= m + 6 * b);
        }
    }
    // reach[i][j]: an increasing chain of consecutively overlapping terms runs from i to j.
    let mut reach = vec![vec![false; n]; n];
    for i in (0..n).rev() {
        for j in i + 1..n {
            if sys.overlaps(&seq[i], &seq[j]) {
                reach[i][j] = true;
                let (head, tail) = reach.split_at_mut(j);
                for (into, &via) in head[i][j + 1..].iter_mut().zip(&tail[0][j + 1..]) {
                    *into |= via;
                }
            }
        }
    }
    let mut interior_ok = true;
    for j in 0..n {
        for i in (0..j).filter(|&i| reach[i][j]) {
            for k in (j + 1..n).filter(|&k| reach[j][k]) {
                interior_ok &= sys.proj_dist(&seq[j], &seq[i], &seq[k]).is_some_and(|d| d >= m + 3 * b);
            }
        }
    }
    let mut chain = Vec::new();
    let mut cur = (n > 0).then_some(0);
    while let Some(c) = cur {
        chain.push(c);
        cur = tau[c];
    }
    let sub: Vec<_> = chain.iter().map(|&i| seq[i].clone()).collect();
    let chain_report = persistence_check(sys, &sub, m, b);
    let conclusions_ok = interior_ok && chain_report.conclusions_ok;
    GeneralPersistenceReport { iota, tau, hypothesis_ok, interior_ok, chain, chain_report, conclusions_ok }
}

/// `α_{k+1} = T_{α_k}^K · α_{k−1}` starting from `α_0, α_1`.
pub fn torus_twist_sequence(alpha0: &Slope, alpha1: &Slope, k: i64, len: usize) -> Vec<Slope> {
    let mut seq = vec![alpha0.clone(), alpha1.clone()];
    while seq.len() < len {
        let n = seq.len();
        let next = twist_about(&seq[n - 1], k).act(&seq[n - 2]);
        seq.push(next);
    }
    seq.truncate(len);
    seq
}

/// Largest annular diameter, over sites `y` and geodesics from `a` to `b` that
/// avoid `y`, of the union of the projections of the geodesic's vertices. Every
/// geodesic (not just the canonical one) is considered, via the geodesic
/// subgraph of a bounded Farey graph large enough to contain them.
pub fn max_avoiding_diameter(a: &Slope, b: &Slope) -> Option<(u64, Slope)> {
    let h = a.height().max(b.height()).to_i64()?.max(2);
    let g = BoundedFarey::new(2 * h);
    let da = g.distances_from(a)?;
    let db = g.distances_from(b)?;
    let total = da[g.index_of(b)?]?;
    let slopes: Vec<Slope> = g.slopes().collect();
    let on_geo: Vec<usize> =
        (0..slopes.len()).filter(|&v| matches!((da[v], db[v]), (Some(x), Some(y)) if x + y == total)).collect();
    // Candidate sites: geodesic vertices and their bounded-graph neighbours.
    let mut candidates: Vec<usize> = on_geo.clone();
    for &v in &on_geo {
        candidates.extend((0..slopes.len()).filter(|&u| crate::farey::adjacent(&slopes[u], &slopes[v])));
    }
    candidates.sort_unstable();
    candidates.dedup();
    let mut best: Option<(u64, Slope)> = None;
    for &y in &candidates {
        if slopes[y] == *a || slopes[y] == *b {
            continue;
        }
        // Layered geodesic DAG with y removed.
        let mut layers: Vec<Vec<usize>> = vec![Vec::new(); total as usize + 1];
        for &v in &on_geo {
            if v != y {
                layers[da[v].unwrap() as usize].push(v);
            }
        }
        let succ = |u: usize, next: &[usize]| -> Vec<usize> {
            next.iter().copied().filter(|&w| crate::farey::adjacent(&slopes[u], &slopes[w])).collect()
        };
        // Keep vertices reachable from a and co-reachable to b.
        let mut alive: Vec<Vec<bool>> = layers.iter().map(|l| vec![false; l.len()]).collect();
        if layers[0].is_empty() {
            continue;
        }
        alive[0][0] = true;
        for t in 1..layers.len() {
            for (k, &w) in layers[t].iter().enumerate() {
                alive[t][k] = layers[t - 1]
                    .iter()
                    .zip(&alive[t - 1])
                    .any(|(&u, &ok)| ok && crate::farey::adjacent(&slopes[u], &slopes[w]));
            }
        }
        if !alive[total as usize].iter().any(|&x| x) {
            continue;
        }
        let proj = |v: usize| -> (BigInt, BigInt) {
            let p = annular_projection(&slopes[y], &slopes[v]);
            (p[0].clone(), p.last().unwrap().clone())
        };
        // Walk back from b: desc[v] = (min lo, max hi) over v and its live descendants.
        let mut desc: Vec<Vec<Option<(BigInt, BigInt)>>> = layers.iter().map(|l| vec![None; l.len()]).collect();
        let mut worst: Option<BigInt> = None;
        for t in (0..layers.len()).rev() {
            for (k, &u) in layers[t].iter().enumerate() {
                if !alive[t][k] {
                    continue;
                }
                let (lo, hi) = proj(u);
                let mut dlo = lo.clone();
                let mut dhi = hi.clone();
                let mut coreach = t == total as usize;
                if t + 1 < layers.len() {
                    for w in succ(u, &layers[t + 1]) {
                        let kw = layers[t + 1].iter().position(|&x| x == w).unwrap();
                        if let Some((wl, wh)) = &desc[t + 1][kw] {
                            coreach = true;
                            dlo = dlo.min(wl.clone());
                            dhi = dhi.max(wh.clone());
                        }
                    }
                }
                if !coreach {
                    continue;
                }
                let cand = std::cmp::max(&dhi - &lo, &hi - &dlo);
                worst = Some(worst.map_or(cand.clone(), |w| w.max(cand)));
                desc[t][k] = Some((dlo, dhi));
            }
        }
        if let Some(w) = worst.and_then(|w| w.to_u64()) {
            if best.as_ref().is_none_or(|(bw, _)| w > *bw) {
                best = Some((w, slopes[y].clone()));
            }
        }
    }
    best
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantsEstimate {
    pub m_emp: u64,
    pub b_emp: u64,
    #[serde(with = "serde_big::ratio")]
    pub c_emp: Rational,
    pub samples: u64,
    /// Violations of the estimated constants on an independent fresh sample.
    pub fresh_violations: u64,
    pub revalidated: bool,
}

/// Sample sizes and seed for [`estimate_torus_constants`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EstimateConfig {
    pub triples: usize,
    pub geodesic_pairs: usize,
    pub twist_samples: usize,
    pub seed: u64,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig { triples: 20_000, geodesic_pairs: 60, twist_samples: 2_000, seed: 0 }
    }
}

/// Draw slope triples: half uniform with height ≤ 10⁴, half from a small box of
/// heights ≤ 6 shifted by a random integer so that tight configurations show up.
pub fn sample_torus_triples(r: &mut Rng, count: usize) -> Vec<(Slope, Slope, Slope)> {
    (0..count)
        .map(|i| {
            if i % 2 == 0 {
                (random_slope(r, 10_000), random_slope(r, 10_000), random_slope(r, 10_000))
            } else {
                let shift = r.random_range(-1000i64..=1000);
                let t = crate::farey::MappingClass::twist_at_infinity(shift);
                let mut pick = || t.act(&random_slope(r, 6));
                (pick(), pick(), pick())
            }
        })
        .collect()
}

fn sample_twists(r: &mut Rng, count: usize) -> Vec<(Slope, Slope, i64)> {
    (0..count)
        .map(|i| {
            let a = random_slope(r, 500);
            // Every fourth sample uses a Farey neighbour of the core curve.
            let b = if i % 4 == 0 {
                conjugator(&a).inverse().act(&Slope::integer(r.random_range(-20i64..=20)))
            } else {
                random_slope(r, 500)
            };
            let mut n = r.random_range(-100i64..=100);
            if n == 0 {
                n = 1;
            }
            (a, b, n)
        })
        .collect()
}

fn sample_pairs(r: &mut Rng, count: usize) -> Vec<(Slope, Slope)> {
    (0..count).map(|_| (random_slope(r, 8), random_slope(r, 8))).collect()
}

fn twist_ratio(samples: &[(Slope, Slope, i64)]) -> Rational {
    samples
        .iter()
        .filter(|(a, b, _)| a != b)
        .map(|(a, b, n)| {
            let d = annular_distance(a, &twist_about(a, *n).act(b), b).expect("b differs from a");
            Ratio::new(d.min(i64::MAX as u64) as i64, n.abs())
        })
        .min()
        .unwrap_or(Ratio::from_integer(1))
}

/// Estimate `M`, `B` and `c` for the torus annuli, then count violations of the
/// estimates on a fresh sample drawn from an independent stream.
pub fn estimate_torus_constants(cfg: EstimateConfig) -> ConstantsEstimate {
    let sys = TorusAnnuli::default();
    let mut r = rng::derived(cfg.seed, "constants");
    let triples = sample_torus_triples(&mut r, cfg.triples);
    let b_emp = behrstock_scan(&sys, &triples, u64::MAX).b_emp;
    let pairs = sample_pairs(&mut r, cfg.geodesic_pairs);
    let m_emp = pairs.iter().filter_map(|(a, b)| max_avoiding_diameter(a, b).map(|x| x.0)).max().unwrap_or(0);
    let c_emp = twist_ratio(&sample_twists(&mut r, cfg.twist_samples));

    let mut fresh = rng::derived(cfg.seed, "constants-fresh");
    let mut fresh_violations = behrstock_scan(&sys, &sample_torus_triples(&mut fresh, cfg.triples), b_emp).violations;
    fresh_violations += sample_pairs(&mut fresh, cfg.geodesic_pairs)
        .iter()
        .filter(|(a, b)| max_avoiding_diameter(a, b).is_some_and(|x| x.0 > m_emp))
        .count() as u64;
    let fresh_c = twist_ratio(&sample_twists(&mut fresh, cfg.twist_samples));
    fresh_violations += u64::from(fresh_c < c_emp);
    ConstantsEstimate {
        m_emp,
        b_emp,
        c_emp,
        samples: (cfg.triples + cfg.geodesic_pairs + cfg.twist_samples) as u64,
        fresh_violations,
        revalidated: fresh_violations == 0,
    }
}

/// Exhaustive estimate on a finite system: every triple and every ambient geodesic.
pub fn estimate_synthetic_constants(sys: &SyntheticSystem) -> ConstantsEstimate {
    let n = sys.len();
    let mut triples = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                triples.push((x, y, z));
            }
        }
    }
    let b_emp = behrstock_scan(sys, &triples, u64::MAX).b_emp;
    let mut m_emp = 0;
    for a in 0..n {
        for b in 0..n {
            let g = sys.ambient_geodesic(&a, &b);
            for y in 0..n {
                if let BgitOutcome::Projects { diameter } = bgit_scan(sys, &y, &g) {
                    m_emp = m_emp.max(diameter);
                }
            }
        }
    }
    ConstantsEstimate {
        m_emp,
        b_emp,
        c_emp: sys.constants.c,
        samples: triples.len() as u64,
        fresh_violations: 0,
        revalidated: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Slope {
        x.parse().unwrap()
    }

    #[test]
    fn torus_overlap_is_distinctness() {
        let t = TorusAnnuli::default();
        assert!(t.overlaps(&s("1/2"), &s("1/3")));
        assert!(!t.overlaps(&s("1/2"), &s("1/2")));
    }

    #[test]
    fn avoiding_geodesic_through_three_integers() {
        // 1/2 → 1 → 2 → 3 → 7/2 avoids 1/0 and spreads its projection over [0, 4].
        let (d, y) = max_avoiding_diameter(&s("1/2"), &s("7/2")).unwrap();
        assert_eq!(d, 4);
        assert!(y.is_infinity());
    }

    #[test]
    fn bgit_blocks_at_the_core_curve() {
        let t = TorusAnnuli::default();
        let g = farey_geodesic(&s("1/2"), &s("7/2"));
        match bgit_scan(&t, &Slope::infinity(), &g) {
            BgitOutcome::Blocked { vertex, .. } => assert!(vertex.is_infinity()),
            other => panic!("expected a block, got {other:?}"),
        }
        // 1/0 and 1/1 sit at -1 and 0 once 1/2 is moved to 1/0.
        assert_eq!(bgit_scan(&t, &s("1/2"), &[s("1/0"), s("1/1")]), BgitOutcome::Projects { diameter: 1 });
    }

    #[test]
    fn synthetic_json_round_trip() {
        let spec = SyntheticSpec { spine: 8, extra: 4, threshold: 7, min_step: 2, max_step: 3 };
        let inst = synthetic_instance(spec, 3).unwrap();
        let back = SyntheticSystem::from_json(&inst.system.to_json()).unwrap();
        assert_eq!(back, inst.system);
    }

    #[test]
    fn synthetic_constants_hold_by_construction() {
        for seed in 0..5 {
            let spec = SyntheticSpec { spine: 10, extra: 8, threshold: 13, min_step: 1, max_step: 3 };
            let inst = synthetic_instance(spec, seed).unwrap();
            let est = estimate_synthetic_constants(&inst.system);
            assert!(est.m_emp <= inst.system.constants.m);
            assert!(est.b_emp <= inst.system.constants.b);
        }
    }
}
