//! Gromov products, four-point hyperbolicity estimates and local-to-global checks
//! for chains of points in a graph metric.

use crate::error::{invalid, Error, Result};
use crate::farey::{farey_distance, farey_geodesic, Slope};
use crate::half::HalfInt;
use crate::rng;
use rand::Rng as _;
use serde::Serialize;
use std::collections::VecDeque;
use std::fmt::Debug;

/// A metric space with integer distances, optionally able to produce geodesics.
pub trait DistanceOracle {
    type Point: Clone + Eq + Ord + Debug + Serialize;

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> Result<u64>;

    /// A geodesic from `x` to `y` with consecutive points at distance 1.
    fn geodesic(&self, _x: &Self::Point, _y: &Self::Point) -> Result<Vec<Self::Point>> {
        Err(Error::Unsupported("this oracle has no geodesics".into()))
    }
}

/// The Farey graph on all slopes.
#[derive(Clone, Copy, Debug, Default)]
pub struct FareyMetric;

impl DistanceOracle for FareyMetric {
    type Point = Slope;

    fn dist(&self, x: &Slope, y: &Slope) -> Result<u64> {
        Ok(farey_distance(x, y))
    }

    fn geodesic(&self, x: &Slope, y: &Slope) -> Result<Vec<Slope>> {
        Ok(farey_geodesic(x, y))
    }
}

/// A finite connected graph on vertices `0..n`, with all distances precomputed.
#[derive(Clone, Debug)]
pub struct FiniteGraph {
    adj: Vec<Vec<usize>>,
    dist: Vec<Vec<u64>>,
}

impl FiniteGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(invalid(format!("bad edge ({u}, {v}) for {n} vertices")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        let mut dist = Vec::with_capacity(n);
        for s in 0..n {
            let row = bfs(&adj, s);
            if row.iter().any(Option::is_none) {
                return Err(invalid("graph is disconnected"));
            }
            dist.push(row.into_iter().map(Option::unwrap).collect());
        }
        Ok(FiniteGraph { adj, dist })
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges)
    }

    /// A random labelled tree: vertex `i > 0` attaches to a uniform earlier vertex.
    pub fn random_tree(n: usize, seed: u64) -> Result<Self> {
        let mut r = rng::seeded(seed);
        let edges: Vec<_> = (1..n).map(|i| (r.random_range(0..i), i)).collect();
        Self::new(n, &edges)
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }
}

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<Option<u64>> {
    let mut d = vec![None; adj.len()];
    d[s] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if d[v].is_none() {
                d[v] = Some(d[u].unwrap() + 1);
                q.push_back(v);
            }
        }
    }
    d
}

impl DistanceOracle for FiniteGraph {
    type Point = usize;

    fn dist(&self, x: &usize, y: &usize) -> Result<u64> {
        self.dist
            .get(*x)
            .and_then(|r| r.get(*y))
            .copied()
            .ok_or_else(|| invalid(format!("vertex out of range: {x} or {y}")))
    }

    fn geodesic(&self, x: &usize, y: &usize) -> Result<Vec<usize>> {
        let mut d = self.dist(x, y)?;
        let mut path = vec![*x];
        let mut cur = *x;
        while d > 0 {
            cur = *self.adj[cur]
                .iter()
                .find(|&&v| self.dist[v][*y] == d - 1)
                .expect("a neighbour one step closer exists");
            path.push(cur);
            d -= 1;
        }
        Ok(path)
    }
}

/// `(x|y)_z = ½(d(x,z) + d(y,z) − d(x,y))`.
pub fn gromov_product<O: DistanceOracle>(o: &O, x: &O::Point, y: &O::Point, z: &O::Point) -> Result<HalfInt> {
    Ok(HalfInt::gromov(o.dist(x, z)? as i64, o.dist(y, z)? as i64, o.dist(x, y)? as i64))
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaEstimate<P> {
    pub delta: HalfInt,
    /// Ordered `(x, y, z, w)` attaining the maximum, if any quadruple was positive.
    pub witness: Option<[P; 4]>,
    pub quadruples: u64,
    pub exhaustive: bool,
}

/// Largest four-point defect `min{(x|z)_w, (y|z)_w} − (x|y)_w` over ordered
/// quadruples of `points`, clamped below at zero. All quadruples are scanned when
/// there are at most `cap` of them; otherwise `cap` quadruples are drawn with `seed`.
pub fn estimate_delta<O: DistanceOracle>(
    o: &O,
    points: &[O::Point],
    cap: u64,
    seed: u64,
) -> Result<DeltaEstimate<O::Point>> {
    let n = points.len();
    let mut d = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = o.dist(&points[i], &points[j])? as i64;
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    let defect = |x: usize, y: usize, z: usize, w: usize| {
        let xz = d[x][w] + d[z][w] - d[x][z];
        let yz = d[y][w] + d[z][w] - d[y][z];
        let xy = d[x][w] + d[y][w] - d[x][y];
        xz.min(yz) - xy
    };
    let total = (n as u64).saturating_pow(4);
    let mut best = (0i64, None);
    let mut consider = |q: [usize; 4]| {
        let v = defect(q[0], q[1], q[2], q[3]);
        if v > best.0 {
            best = (v, Some(q));
        }
    };
    let exhaustive = total <= cap;
    if exhaustive {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for w in 0..n {
                        consider([x, y, z, w]);
                    }
                }
            }
        }
    } else {
        let mut r = rng::seeded(seed);
        for _ in 0..cap {
            consider(std::array::from_fn(|_| r.random_range(0..n)));
        }
    }
    Ok(DeltaEstimate {
        delta: HalfInt::from_halves(best.0),
        witness: best.1.map(|q| q.map(|i| points[i].clone())),
        quadruples: if exhaustive { total } else { cap },
        exhaustive,
    })
}

/// Gromov products are 1-Lipschitz in each argument:
/// `|(y|x)_z − (x|w)_z| ≤ d(y, w)`.
pub fn check_gp_stability<O: DistanceOracle>(
    o: &O,
    x: &O::Point,
    y: &O::Point,
    w: &O::Point,
    z: &O::Point,
) -> Result<bool> {
    let lhs = gromov_product(o, y, x, z)? - gromov_product(o, x, w, z)?;
    let bound = HalfInt::from_int(o.dist(y, w)? as i64);
    Ok(lhs <= bound && -lhs <= bound)
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichCheck {
    pub gromov_product: HalfInt,
    pub distance_to_geodesic: u64,
    pub ok: bool,
}

/// `d(z, [x,y]) − 4δ ≤ (x|y)_z ≤ d(z, [x,y])` for the oracle's geodesic `[x,y]`.
pub fn check_geodesic_sandwich<O: DistanceOracle>(
    o: &O,
    x: &O::Point,
    y: &O::Point,
    z: &O::Point,
    delta: HalfInt,
) -> Result<SandwichCheck> {
    let path = o.geodesic(x, y)?;
    let gp = gromov_product(o, x, y, z)?;
    let mut near = u64::MAX;
    for p in &path {
        near = near.min(o.dist(z, p)?);
    }
    let dz = HalfInt::from_int(near as i64);
    Ok(SandwichCheck { gromov_product: gp, distance_to_geodesic: near, ok: dz - delta * 4 <= gp && gp <= dz })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport<P> {
    pub chain: Vec<P>,
    pub a: HalfInt,
    pub delta: HalfInt,
    /// Allowed loss per junction, `A + 6δ`.
    pub d: HalfInt,
    pub hypothesis_ok: bool,
    pub conclusion_ok: bool,
    /// `d(x0, xn) − (Σ − 2D(n−1))`; nonnegative when the lower bound holds.
    pub slack: HalfInt,
    pub segment_sum: u64,
    pub endpoint_distance: u64,
    /// Whether every chain point lies within `D` of the oracle's geodesic; `None`
    /// when that check was not requested.
    pub geodesic_ok: Option<bool>,
}

/// Verify the local-to-global principle on a chain `x0, …, xn`.
///
/// Hypothesis: each interior product `(x_{i−1}|x_{i+1})_{x_i} ≤ A` and each
/// segment is longer than `4A + 24δ`. Conclusion: `d(x0,xn) ≥ Σ − 2D(n−1)` and
/// `Σ ≤ 2·d(x0,xn)` with `D = A + 6δ`, plus, when `check_geodesic` is set, every
/// `x_i` within `D` of a geodesic from `x0` to `xn`.
pub fn check_local_to_global<O: DistanceOracle>(
    o: &O,
    chain: &[O::Point],
    a: HalfInt,
    delta: HalfInt,
    check_geodesic: bool,
) -> Result<ChainReport<O::Point>> {
    if chain.len() < 2 {
        return Err(invalid("a chain needs at least two points"));
    }
    let n = chain.len() - 1;
    let d_const = a + delta * 6;
    let gap_floor = a * 4 + delta * 24;
    let mut segment_sum = 0u64;
    let mut hypothesis_ok = true;
    for w in chain.windows(2) {
        let g = o.dist(&w[0], &w[1])?;
        segment_sum += g;
        hypothesis_ok &= HalfInt::from_int(g as i64) > gap_floor;
    }
    for w in chain.windows(3) {
        hypothesis_ok &= gromov_product(o, &w[0], &w[2], &w[1])? <= a;
    }
    let end = o.dist(&chain[0], &chain[n])?;
    let lower = HalfInt::from_int(segment_sum as i64) - d_const * (2 * (n as i64 - 1));
    let slack = HalfInt::from_int(end as i64) - lower;
    let mut conclusion_ok = slack >= HalfInt::ZERO && segment_sum <= 2 * end;
    let geodesic_ok = if check_geodesic {
        let path = o.geodesic(&chain[0], &chain[n])?;
        let mut all = true;
        for x in chain {
            all &= within_of_path(o, x, &chain[0], &path, d_const)?;
        }
        conclusion_ok &= all;
        Some(all)
    } else {
        None
    };
    Ok(ChainReport {
        chain: chain.to_vec(),
        a,
        delta,
        d: d_const,
        hypothesis_ok,
        conclusion_ok,
        slack,
        segment_sum,
        endpoint_distance: end,
        geodesic_ok,
    })
}

/// Whether `x` is within `radius` of some vertex of a geodesic starting at
/// `start`. Only vertices whose position can pass the triangle inequality are probed.
fn within_of_path<O: DistanceOracle>(
    o: &O,
    x: &O::Point,
    start: &O::Point,
    path: &[O::Point],
    radius: HalfInt,
) -> Result<bool> {
    let r = radius.floor().max(0) as u64;
    let t = o.dist(start, x)?;
    let lo = t.saturating_sub(r) as usize;
    let hi = ((t + r) as usize).min(path.len().saturating_sub(1));
    for p in path.iter().take(hi + 1).skip(lo) {
        if o.dist(x, p)? <= r {
            return Ok(true);
        }
    }
    Ok(false)
}
