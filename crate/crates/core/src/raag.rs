//! Right-angled Artin groups: presentation graphs, normal forms, free-product
//! splitting along components, admissibility of abstract subsurface families and
//! the letter bookkeeping behind the power threshold for free products of RAAGs.
//!
//! Normal forms are reduced (no two syllables of one generator can be shuffled
//! together) and then lexicographically least among all shuffles by commuting
//! syllables. In particular adjacent commuting syllables appear in increasing
//! generator order.

use crate::error::{invalid, Error, Result};
use crate::projections::Rational;
use crate::serde_big;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// `x_gen ^ exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, i64)", into = "(usize, i64)")]
pub struct Syllable {
    pub gen: usize,
    pub exp: i64,
}

impl From<(usize, i64)> for Syllable {
    fn from((gen, exp): (usize, i64)) -> Self {
        Syllable { gen, exp }
    }
}

impl From<Syllable> for (usize, i64) {
    fn from(s: Syllable) -> Self {
        (s.gen, s.exp)
    }
}

/// A word in the generators, serialized as `[[gen, exp], …]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Syllable>);

impl Word {
    pub fn new(syllables: impl IntoIterator<Item = (usize, i64)>) -> Self {
        Word(syllables.into_iter().map(Syllable::from).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|s| Syllable { gen: s.gen, exp: -s.exp }).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.0
    }
}

impl fmt::Display for Word {
    /// `x1^3 x2 x4^-1`; the empty word prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match s.exp {
                1 => write!(f, "x{}", s.gen)?,
                e => write!(f, "x{}^{}", s.gen, e)?,
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;
    /// Parses `x1^0 x2`, `x2x1`, `x3^-2`; `1` or an empty string is the identity.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() || t == "1" {
            return Ok(Word::default());
        }
        let bad = || Error::MalformedWord(format!("cannot parse {s:?}"));
        let mut out = Vec::new();
        for piece in t.split('x').skip(1) {
            let (g, e) = match piece.split_once('^') {
                Some((g, e)) => (g, e.parse::<i64>().map_err(|_| bad())?),
                None => (piece, 1),
            };
            out.push((g.parse::<usize>().map_err(|_| bad())?, e));
        }
        if !t.starts_with('x') {
            return Err(bad());
        }
        Ok(Word::new(out))
    }
}

/// Presentation graph: vertices are generators, edges mark commuting pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaagGraph {
    adj: Vec<BTreeSet<usize>>,
}

impl RaagGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(invalid(format!("bad edge ({u}, {v}) for {n} vertices")));
            }
            adj[u].insert(v);
            adj[v].insert(u);
        }
        Ok(RaagGraph { adj })
    }

    pub fn edgeless(n: usize) -> Self {
        RaagGraph { adj: vec![BTreeSet::new(); n] }
    }

    /// From adjacency lists; the lists must be symmetric.
    pub fn from_adjacency(lists: &[Vec<usize>]) -> Result<Self> {
        let n = lists.len();
        let mut edges = Vec::new();
        for (u, l) in lists.iter().enumerate() {
            for &v in l {
                if v >= n || !lists[v].contains(&u) {
                    return Err(invalid(format!("adjacency not symmetric at ({u}, {v})")));
                }
                edges.push((u, v));
            }
        }
        Self::new(n, &edges)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        self.adj.iter().map(|s| s.iter().copied().collect()).collect()
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for (u, s) in self.adj.iter().enumerate() {
            e.extend(s.range(u + 1..).map(|&v| (u, v)));
        }
        e
    }

    /// Distinct and joined by an edge.
    pub fn commute(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    fn check(&self, w: &Word) -> Result<()> {
        match w.0.iter().find(|s| s.gen >= self.len()) {
            Some(s) => Err(invalid(format!("generator x{} outside a graph on {} vertices", s.gen, self.len()))),
            None => Ok(()),
        }
    }
}

impl Serialize for RaagGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.adjacency().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RaagGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let lists = Vec::<Vec<usize>>::deserialize(d)?;
        RaagGraph::from_adjacency(&lists).map_err(serde::de::Error::custom)
    }
}

/// The unique normal form of `w`.
pub fn normal_form(g: &RaagGraph, w: &Word) -> Result<Word> {
    g.check(w)?;
    // Reduce: fold each syllable into the latest same-generator syllable it can
    // reach through commuting syllables. The prefix stays reduced throughout.
    let mut red: Vec<Syllable> = Vec::with_capacity(w.len());
    for &s in w.0.iter().filter(|s| s.exp != 0) {
        let mut merged = false;
        for k in (0..red.len()).rev() {
            if red[k].gen == s.gen {
                red[k].exp += s.exp;
                if red[k].exp == 0 {
                    red.remove(k);
                }
                merged = true;
                break;
            }
            if !g.commute(red[k].gen, s.gen) {
                break;
            }
        }
        if !merged {
            red.push(s);
        }
    }
    // Lexicographically least shuffle: repeatedly take the smallest generator
    // whose non-commuting predecessors are all placed.
    let n = red.len();
    let mut placed = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&j| !placed[j])
            .filter(|&j| (0..j).all(|i| placed[i] || g.commute(red[i].gen, red[j].gen)))
            .min_by_key(|&j| (red[j].gen, j))
            .expect("some syllable is free");
        placed[next] = true;
        out.push(red[next]);
    }
    Ok(Word(out))
}

pub fn is_normal_form(g: &RaagGraph, w: &Word) -> Result<bool> {
    Ok(normal_form(g, w)? == *w)
}

/// One application of a rewrite rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rewrite {
    /// Drop the zero-exponent syllable at `at`.
    Delete { at: usize },
    /// Fold syllable `from` into the same-generator syllable `into < from`; every
    /// syllable strictly between commutes with that generator.
    Merge { into: usize, from: usize },
    /// Move syllable `from` left to position `to`; it commutes with every syllable
    /// in `to..from` and has a smaller generator than the one at `to`.
    Swap { to: usize, from: usize },
}

/// All applicable rewrites, grouped by rule (deletes, then merges, then swaps) and
/// ordered by leftmost position within each group.
pub fn applicable_rewrites(g: &RaagGraph, w: &Word) -> Vec<Rewrite> {
    let s = &w.0;
    let mut out: Vec<Rewrite> = (0..s.len()).filter(|&i| s[i].exp == 0).map(|at| Rewrite::Delete { at }).collect();
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if s[j].gen == s[i].gen {
                if (i + 1..j).all(|k| g.commute(s[k].gen, s[i].gen)) {
                    out.push(Rewrite::Merge { into: i, from: j });
                }
                break;
            }
        }
    }
    for to in 0..s.len() {
        for from in to + 1..s.len() {
            if s[from].gen < s[to].gen && (to..from).all(|k| g.commute(s[k].gen, s[from].gen)) {
                out.push(Rewrite::Swap { to, from });
            }
        }
    }
    out
}

pub fn apply_rewrite(w: &Word, r: Rewrite) -> Word {
    let mut s = w.0.clone();
    match r {
        Rewrite::Delete { at } => {
            s.remove(at);
        }
        Rewrite::Merge { into, from } => {
            s[into].exp += s[from].exp;
            s.remove(from);
        }
        Rewrite::Swap { to, from } => {
            let x = s.remove(from);
            s.insert(to, x);
        }
    }
    Word(s)
}

/// Rewrite to a terminal word, letting `choose` pick among the applicable rules.
pub fn rewrite_with(g: &RaagGraph, w: &Word, mut choose: impl FnMut(&[Rewrite]) -> usize) -> Result<Word> {
    g.check(w)?;
    let mut cur = w.clone();
    loop {
        let opts = applicable_rewrites(g, &cur);
        if opts.is_empty() {
            return Ok(cur);
        }
        let k = choose(&opts).min(opts.len() - 1);
        cur = apply_rewrite(&cur, opts[k]);
    }
}

/// Leftmost applicable rule with priority delete, merge, swap.
pub fn normal_form_by_rules(g: &RaagGraph, w: &Word) -> Result<Word> {
    rewrite_with(g, w, |_| 0)
}

/// Connected components, each sorted, ordered by least vertex.
pub fn components(g: &RaagGraph) -> Vec<Vec<usize>> {
    let n = g.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &v in &g.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    stack.push(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Disjoint,
    Overlap,
    Nested,
    BoundaryAnnulus,
    Equal,
}

/// Subsurfaces known only through their pairwise relations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbstractFamily {
    /// `relations[i][j]` for `i ≠ j`; diagonal entries are ignored.
    pub relations: Vec<Vec<Relation>>,
}

impl AbstractFamily {
    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// Edges join disjoint members.
    pub fn realization_graph(&self) -> Result<RaagGraph> {
        let n = self.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.relations[i][j] == Relation::Disjoint {
                    edges.push((i, j));
                }
            }
        }
        RaagGraph::new(n, &edges)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub violation: Option<(usize, usize, Relation)>,
}

/// Admissible when no two distinct members are nested, equal, or one the annulus
/// about a boundary component of the other.
pub fn admissibility_check(f: &AbstractFamily) -> Result<AdmissibilityReport> {
    let n = f.len();
    if f.relations.iter().any(|r| r.len() != n) {
        return Err(invalid("relation table is not square"));
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let r = f.relations[i][j];
            let symmetric_kind = matches!(r, Relation::Disjoint | Relation::Overlap | Relation::Equal);
            if symmetric_kind && f.relations[j][i] != r {
                return Err(invalid(format!("relation ({i}, {j}) is not symmetric")));
            }
            if matches!(r, Relation::Nested | Relation::BoundaryAnnulus | Relation::Equal) {
                return Ok(AdmissibilityReport { admissible: false, violation: Some((i, j, r)) });
            }
        }
    }
    Ok(AdmissibilityReport { admissible: true, violation: None })
}

/// A subword `h_s` from part `part` of the partition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Subword {
    pub part: usize,
    pub word: Word,
}

/// Letter bookkeeping for a word in a free product of RAAGs. Letter and subword
/// positions are 1-based.
#[derive(Clone, Debug, Serialize)]
pub struct SupportReport {
    pub letters: Vec<Syllable>,
    /// `ν(t)`: generator of letter `t`.
    pub nu: Vec<usize>,
    /// `σ(s)`: position of the first letter of subword `s`.
    pub sigma: Vec<usize>,
    /// `ι(j)`: last earlier letter overlapping letter `j`.
    pub iota: Vec<Option<usize>>,
    /// `τ(j)`: first later letter overlapping letter `j`.
    pub tau: Vec<Option<usize>>,
    /// Whenever `ι(j) < t < τ(j)` and `t ≠ j`, letters `j` and `t` commute (distinct
    /// adjacent generators) and lie in one subword.
    pub claim72_ok: bool,
    pub first_failure: Option<(usize, usize)>,
}

pub fn support_bookkeeping(g: &RaagGraph, parts: &[Vec<usize>], word: &[Subword]) -> Result<SupportReport> {
    let mut part_of = vec![None; g.len()];
    for (k, p) in parts.iter().enumerate() {
        for &v in p {
            if v >= g.len() || part_of[v].replace(k).is_some() {
                return Err(invalid(format!("vertex {v} is out of range or in two parts")));
            }
        }
    }
    for (u, v) in g.edges() {
        if part_of[u] != part_of[v] {
            return Err(invalid(format!("edge ({u}, {v}) joins two parts")));
        }
    }
    for (s, h) in word.iter().enumerate() {
        if h.part >= parts.len() {
            return Err(invalid(format!("subword {} names part {}", s + 1, h.part)));
        }
        if h.word.is_empty() {
            return Err(Error::MalformedWord(format!("subword {} is empty", s + 1)));
        }
        if s > 0 && word[s - 1].part == h.part {
            return Err(Error::MalformedWord(format!("subwords {} and {} both come from part {}", s, s + 1, h.part)));
        }
        if let Some(x) = h.word.0.iter().find(|x| x.gen >= g.len() || part_of[x.gen] != Some(h.part)) {
            return Err(invalid(format!("x{} is not in part {}", x.gen, h.part)));
        }
    }
    let mut letters = Vec::new();
    let mut sub_of = Vec::new();
    let mut sigma = Vec::new();
    for (s, h) in word.iter().enumerate() {
        sigma.push(letters.len() + 1);
        for &x in &h.word.0 {
            letters.push(x);
            sub_of.push(s);
        }
    }
    let l = letters.len();
    let overlaps = |a: usize, b: usize| {
        let (x, y) = (letters[a].gen, letters[b].gen);
        x != y && !g.commute(x, y)
    };
    let iota: Vec<Option<usize>> = (0..l).map(|j| (0..j).rev().find(|&i| overlaps(i, j))).collect();
    let tau: Vec<Option<usize>> = (0..l).map(|j| (j + 1..l).find(|&k| overlaps(j, k))).collect();
    let mut first_failure = None;
    'outer: for j in 0..l {
        let lo = iota[j].map_or(0, |i| i + 1);
        let hi = tau[j].unwrap_or(l);
        for t in (lo..hi).filter(|&t| t != j) {
            let ok = sub_of[t] == sub_of[j] && g.commute(letters[t].gen, letters[j].gen);
            if !ok {
                first_failure = Some((j + 1, t + 1));
                break 'outer;
            }
        }
    }
    Ok(SupportReport {
        nu: letters.iter().map(|x| x.gen).collect(),
        letters,
        sigma,
        iota: iota.into_iter().map(|x| x.map(|i| i + 1)).collect(),
        tau: tau.into_iter().map(|x| x.map(|i| i + 1)).collect(),
        claim72_ok: first_failure.is_none(),
        first_failure,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Threshold {
    /// `(B + 6M + D) / c`.
    #[serde(with = "serde_big::ratio")]
    pub n: Rational,
    /// Least integer exponent at or above the threshold.
    pub exponent: i64,
}

pub fn theorem_a_threshold(c: Rational, b: u64, m: u64, d: u64) -> Result<Threshold> {
    if c <= Rational::from_integer(0) {
        return Err(invalid(format!("c must be positive, got {c}")));
    }
    let n = Rational::from_integer((b + 6 * m + d) as i64) / c;
    Ok(Threshold { n, exponent: n.ceil().to_integer() })
}
