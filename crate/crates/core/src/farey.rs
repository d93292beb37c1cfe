//! Slopes on the torus, the Farey graph, and the projective action of SL(2, ℤ).
//!
//! Distances are computed from the continued-fraction ladder: after moving one
//! endpoint to `1/0`, every geodesic stays inside the fans of triangles crossed by
//! the hyperbolic geodesic, and a two-state recursion over the partial quotients
//! gives the exact distance.

use crate::error::{invalid, Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

/// A reduced fraction `p/q` with `q ≥ 0`; `1/0` is the slope at infinity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Slope {
    p: BigInt,
    q: BigInt,
}

impl Slope {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let (p, q) = (p.into(), q.into());
        if p.is_zero() && q.is_zero() {
            return Err(invalid("0/0 is not a slope"));
        }
        Ok(Self::normalize(p, q))
    }

    /// Canonical form of a nonzero integer vector.
    fn normalize(p: BigInt, q: BigInt) -> Self {
        if q.is_zero() {
            return Self::infinity();
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / &g, q / &g);
        if q.is_negative() {
            p = -p;
            q = -q;
        }
        Slope { p, q }
    }

    pub fn infinity() -> Self {
        Slope { p: BigInt::one(), q: BigInt::zero() }
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Slope { p: n.into(), q: BigInt::one() }
    }

    pub fn numer(&self) -> &BigInt {
        &self.p
    }

    pub fn denom(&self) -> &BigInt {
        &self.q
    }

    pub fn is_infinity(&self) -> bool {
        self.q.is_zero()
    }

    /// `max(|p|, q)`, the size used to bound finite searches.
    pub fn height(&self) -> BigInt {
        std::cmp::max(self.p.abs(), self.q.clone())
    }

    /// `|ps - rq|`, the geometric intersection number of the two curves.
    pub fn intersection(&self, other: &Slope) -> BigInt {
        (&self.p * &other.q - &other.p * &self.q).abs()
    }

    pub fn floor(&self) -> Option<BigInt> {
        (!self.is_infinity()).then(|| self.p.div_floor(&self.q))
    }

    pub fn ceil(&self) -> Option<BigInt> {
        (!self.is_infinity()).then(|| -((-&self.p).div_floor(&self.q)))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| t.trim().parse::<BigInt>().map_err(|_| invalid(format!("bad slope {s:?}")));
        match s.split_once('/') {
            Some((p, q)) => Slope::new(parse(p)?, parse(q)?),
            None => Ok(Slope::integer(parse(s)?)),
        }
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// An element of SL(2, ℤ), read as a mapping class of the torus.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct MappingClass {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl MappingClass {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self> {
        let m = MappingClass { a: a.into(), b: b.into(), c: c.into(), d: d.into() };
        if !(&m.a * &m.d - &m.b * &m.c).is_one() {
            return Err(invalid(format!("determinant of {m} is not 1")));
        }
        Ok(m)
    }

    fn raw(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        MappingClass { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::raw(BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one())
    }

    /// `[[1, n], [0, 1]]`, the Dehn twist about `1/0`.
    pub fn twist_at_infinity(n: impl Into<BigInt>) -> Self {
        Self::raw(BigInt::one(), n.into(), BigInt::zero(), BigInt::one())
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn inverse(&self) -> Self {
        Self::raw(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    pub fn negate(&self) -> Self {
        Self::raw(-&self.a, -&self.b, -&self.c, -&self.d)
    }

    pub fn pow(&self, n: i64) -> Self {
        let mut base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// `±I`: trivial as a map on slopes.
    pub fn is_central(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d && self.a.abs().is_one()
    }

    /// Equality as maps on slopes, i.e. up to sign.
    pub fn projectively_eq(&self, other: &Self) -> bool {
        self == other || *self == other.negate()
    }

    /// Representative with a canonical sign, for deduplicating up to `±I`.
    pub fn projective_key(&self) -> Self {
        let first = [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .find(|x| !x.is_zero())
            .expect("determinant 1 matrices are nonzero");
        if first.is_negative() {
            self.negate()
        } else {
            self.clone()
        }
    }

    pub fn act(&self, s: &Slope) -> Slope {
        let p = &self.a * &s.p + &self.b * &s.q;
        let q = &self.c * &s.p + &self.d * &s.q;
        // Unimodular maps preserve primitivity, so only the sign needs fixing.
        if q.is_zero() {
            Slope::infinity()
        } else if q.is_negative() {
            Slope { p: -p, q: -q }
        } else {
            Slope { p, q }
        }
    }

    /// Conjugate `self` by `g`: returns `g⁻¹ · self · g`.
    pub fn conjugate_by(&self, g: &MappingClass) -> Self {
        &(&g.inverse() * self) * g
    }
}

impl Mul for &MappingClass {
    type Output = MappingClass;
    fn mul(self, o: &MappingClass) -> MappingClass {
        MappingClass::raw(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }
}

impl fmt::Display for MappingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for MappingClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let nums: Vec<BigInt> = s
            .split(|c: char| !(c.is_ascii_digit() || c == '-'))
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<BigInt>().map_err(|_| invalid(format!("bad matrix {s:?}"))))
            .collect::<Result<_>>()?;
        match <[BigInt; 4]>::try_from(nums) {
            Ok([a, b, c, d]) => MappingClass::new(a, b, c, d),
            Err(_) => Err(invalid(format!("matrix needs four entries: {s:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Entries(
    #[serde(with = "crate::serde_big")] BigInt,
    #[serde(with = "crate::serde_big")] BigInt,
    #[serde(with = "crate::serde_big")] BigInt,
    #[serde(with = "crate::serde_big")] BigInt,
);

impl Serialize for MappingClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Entries(self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MappingClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let Entries(a, b, c, dd) = Entries::deserialize(d)?;
        MappingClass::new(a, b, c, dd).map_err(serde::de::Error::custom)
    }
}

/// Adjacent in the Farey graph: intersection number exactly one.
pub fn adjacent(a: &Slope, b: &Slope) -> bool {
    a.intersection(b).is_one()
}

/// A fixed element of SL(2, ℤ) sending `alpha` to `1/0`, built from the extended
/// Euclidean algorithm. It is the identity when `alpha` is already `1/0`.
pub fn conjugator(alpha: &Slope) -> MappingClass {
    if alpha.is_infinity() {
        return MappingClass::identity();
    }
    // Row (q, -p) kills alpha; the first row solves a·p + b·q = -1.
    let e = alpha.p.extended_gcd(&alpha.q);
    debug_assert!(e.gcd.is_one());
    MappingClass::raw(-e.x, -e.y, alpha.q.clone(), -&alpha.p)
}

/// Regular continued fraction `[a0; a1, ..., an]` of a finite slope, with `a0`
/// the floor and every later term positive.
pub fn continued_fraction(s: &Slope) -> Vec<BigInt> {
    assert!(!s.is_infinity(), "1/0 has no continued fraction");
    let (mut p, mut q) = (s.p.clone(), s.q.clone());
    let mut terms = Vec::new();
    while !q.is_zero() {
        let (a, r) = p.div_mod_floor(&q);
        terms.push(a);
        p = q;
        q = r;
    }
    terms
}

#[derive(Clone, Copy)]
enum Step {
    /// Reached from the previous convergent across the fan's pivot edge.
    Pivot,
    /// Reached by walking the rim of the fan from the convergent two back.
    Rim,
}

/// Exact Farey distance from `1/0` to `x`, plus the back-pointers for a geodesic.
fn ladder(x: &Slope) -> (u64, Vec<BigInt>, Vec<Step>, Vec<u64>) {
    let cf = continued_fraction(x);
    // dist[k] is the distance to convergent c_{k-1}; index 0 is 1/0 itself.
    let mut dist: Vec<u64> = vec![0, 1];
    let mut steps = vec![Step::Pivot, Step::Pivot];
    for (k, a) in cf.iter().enumerate().skip(1) {
        let rim_start = dist[k - 1];
        let pivot = dist[k];
        let rim = a.to_u64().map_or(u64::MAX, |a| rim_start.saturating_add(a));
        if pivot < rim {
            dist.push(pivot + 1);
            steps.push(Step::Pivot);
        } else {
            dist.push(rim);
            steps.push(Step::Rim);
        }
    }
    (*dist.last().unwrap(), cf, steps, dist)
}

fn distance_from_infinity(x: &Slope) -> u64 {
    if x.is_infinity() {
        0
    } else {
        ladder(x).0
    }
}

fn geodesic_from_infinity(x: &Slope) -> Vec<Slope> {
    if x.is_infinity() {
        return vec![Slope::infinity()];
    }
    let (_, cf, steps, _) = ladder(x);
    // Convergents h/k with c_{-2} = 0/1 and c_{-1} = 1/0, stored at offset 2.
    let mut h = vec![BigInt::zero(), BigInt::one()];
    let mut kk = vec![BigInt::one(), BigInt::zero()];
    for a in &cf {
        let n = h.len();
        h.push(a * &h[n - 1] + &h[n - 2]);
        kk.push(a * &kk[n - 1] + &kk[n - 2]);
    }
    let conv = |i: usize| Slope::normalize(h[i].clone(), kk[i].clone());
    // Walk back from c_n (index cf.len() + 1 in h/kk, index cf.len() in steps).
    let mut rev = Vec::new();
    let mut i = cf.len() + 1;
    while i > 1 {
        rev.push(conv(i));
        match steps[i - 1] {
            Step::Pivot => i -= 1,
            Step::Rim => {
                let a = cf[i - 2].to_u64().expect("rim walks are short");
                for j in (1..a).rev() {
                    let jb = BigInt::from(j);
                    rev.push(Slope::normalize(&h[i - 2] + &jb * &h[i - 1], &kk[i - 2] + &jb * &kk[i - 1]));
                }
                i -= 2;
            }
        }
    }
    rev.push(Slope::infinity());
    rev.reverse();
    rev
}

/// Exact distance in the Farey graph.
pub fn farey_distance(a: &Slope, b: &Slope) -> u64 {
    distance_from_infinity(&conjugator(a).act(b))
}

/// A geodesic from `a` to `b`, endpoints included. Deterministic.
pub fn farey_geodesic(a: &Slope, b: &Slope) -> Vec<Slope> {
    let m = conjugator(a);
    let back = m.inverse();
    geodesic_from_infinity(&m.act(b)).iter().map(|s| back.act(s)).collect()
}

/// The Dehn twist about `alpha` raised to the `n`: `M⁻¹ · [[1,n],[0,1]] · M` where
/// `M` is [`conjugator`]`(alpha)`.
pub fn twist_about(alpha: &Slope, n: impl Into<BigInt>) -> MappingClass {
    MappingClass::twist_at_infinity(n).conjugate_by(&conjugator(alpha))
}

/// Projection of `beta` to the annulus about `alpha`: the floor and ceiling of
/// `beta` after moving `alpha` to `1/0`. Empty when `beta == alpha`.
pub fn annular_projection(alpha: &Slope, beta: &Slope) -> Vec<BigInt> {
    let x = conjugator(alpha).act(beta);
    match (x.floor(), x.ceil()) {
        (Some(f), Some(c)) if f == c => vec![f],
        (Some(f), Some(c)) => vec![f, c],
        _ => Vec::new(),
    }
}

/// Diameter of the union of the annular projections of `beta` and `gamma`.
/// Saturates at `u64::MAX`.
pub fn annular_distance(alpha: &Slope, beta: &Slope, gamma: &Slope) -> Result<u64> {
    let pb = annular_projection(alpha, beta);
    let pg = annular_projection(alpha, gamma);
    if pb.is_empty() || pg.is_empty() {
        return Err(Error::EmptyProjection(format!("{} or {} equals the core slope {alpha}", beta, gamma)));
    }
    let lo = pb.iter().chain(&pg).min().unwrap();
    let hi = pb.iter().chain(&pg).max().unwrap();
    Ok((hi - lo).to_u64().unwrap_or(u64::MAX))
}

/// A slope `p/q` with `1 ≤ q ≤ max_height` and `|p| ≤ max_height`, reduced.
pub fn random_slope(r: &mut crate::rng::Rng, max_height: i64) -> Slope {
    use rand::Rng as _;
    let q = r.random_range(1..=max_height);
    let p = r.random_range(-max_height..=max_height);
    Slope::normalize(p.into(), q.into())
}

/// Breadth-first Farey distance on the finite subgraph of slopes with
/// `|p|, |q| ≤ bound`. Independent of the continued-fraction ladder; used as a
/// cross-check.
pub mod oracle {
    use super::Slope;
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    use std::collections::{HashMap, VecDeque};

    pub struct BoundedFarey {
        bound: i64,
        index: HashMap<(i64, i64), usize>,
        verts: Vec<(i64, i64)>,
        adj: Vec<Vec<usize>>,
    }

    fn canon(p: i64, q: i64) -> (i64, i64) {
        if q == 0 {
            (1, 0)
        } else if q < 0 {
            (-p, -q)
        } else {
            (p, q)
        }
    }

    impl BoundedFarey {
        pub fn new(bound: i64) -> Self {
            assert!(bound >= 1);
            let mut verts = vec![(1, 0)];
            for q in 1..=bound {
                for p in -bound..=bound {
                    if p.gcd(&q) == 1 {
                        verts.push((p, q));
                    }
                }
            }
            let index: HashMap<_, _> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let mut adj = vec![Vec::new(); verts.len()];
            for (i, &(p, q)) in verts.iter().enumerate() {
                for &(r, s) in &verts[i + 1..] {
                    if (p * s - r * q).abs() == 1 {
                        let j = index[&(r, s)];
                        adj[i].push(j);
                        adj[j].push(i);
                    }
                }
            }
            BoundedFarey { bound, index, verts, adj }
        }

        pub fn bound(&self) -> i64 {
            self.bound
        }

        pub fn len(&self) -> usize {
            self.verts.len()
        }

        pub fn is_empty(&self) -> bool {
            self.verts.is_empty()
        }

        pub fn slopes(&self) -> impl Iterator<Item = Slope> + '_ {
            self.verts.iter().map(|&(p, q)| Slope::new(p, q).unwrap())
        }

        fn idx(&self, s: &Slope) -> Option<usize> {
            let p = s.numer().to_i64()?;
            let q = s.denom().to_i64()?;
            self.index.get(&canon(p, q)).copied()
        }

        /// Distances from `src` to every vertex of the bounded graph.
        pub fn distances_from(&self, src: &Slope) -> Option<Vec<Option<u64>>> {
            let s = self.idx(src)?;
            let mut d = vec![None; self.verts.len()];
            d[s] = Some(0);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let du = d[u].unwrap();
                for &v in &self.adj[u] {
                    if d[v].is_none() {
                        d[v] = Some(du + 1);
                        queue.push_back(v);
                    }
                }
            }
            Some(d)
        }

        pub fn distance(&self, a: &Slope, b: &Slope) -> Option<u64> {
            let t = self.idx(b)?;
            self.distances_from(a)?[t]
        }

        pub fn index_of(&self, s: &Slope) -> Option<usize> {
            self.idx(s)
        }
    }

    /// BFS distance at bound `Q`, doubling `Q` until two consecutive values agree.
    /// Returns the stabilized distance and the bound at which it stabilized.
    pub fn stabilized_distance(a: &Slope, b: &Slope, max_bound: i64) -> Option<(u64, i64)> {
        let h = a.height().max(b.height()).to_i64()?.max(1);
        let mut q = h;
        let mut prev = BoundedFarey::new(q).distance(a, b);
        while q * 2 <= max_bound {
            q *= 2;
            let next = BoundedFarey::new(q).distance(a, b);
            if next.is_some() && next == prev {
                return next.map(|d| (d, q));
            }
            prev = next;
        }
        None
    }
}
