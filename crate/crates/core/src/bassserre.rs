//! Bass-Serre trees of free products `H_1 ∗ ⋯ ∗ H_n`, the orbit map into the
//! Farey graph, and the checks built on it: quasi-isometric embedding data,
//! searches for relations among the factors, and traces of mixed words.
//!
//! The tree is combinatorial. An element of the free product is an alternating
//! word of syllables `(factor, element index)`, with the index pointing into the
//! factor's enumeration (index 0 is the identity and never appears in a word).
//! Element vertices `v(g)` sit at even depth and coset vertices `v(gH_i)` at odd
//! depth; a coset is written with a prefix whose last syllable is not from `H_i`.

use crate::error::{invalid, Error, Result};
use crate::farey::{MappingClass, Slope};
use crate::hypgraph::DistanceOracle;
use crate::rng;
use crate::subgroups::{GroupElement, Letter, MatrixGroup};
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A factor `H_i` given by matrix generators, with its reducing multicurve `∂H_i`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorSpec {
    pub group: MatrixGroup,
    pub boundary: Vec<Slope>,
}

impl FactorSpec {
    pub fn new(generators: Vec<MappingClass>, boundary: Vec<Slope>, budget: usize) -> Self {
        FactorSpec { group: MatrixGroup::new(generators, budget), boundary }
    }

    /// A cyclic factor `⟨g⟩` enumerated as `1, g, g⁻¹, g², g⁻², …` up to `|exponent| ≤ max_power`.
    pub fn cyclic(g: MappingClass, boundary: Vec<Slope>, max_power: usize) -> Self {
        Self::new(vec![g], boundary, 2 * max_power + 1)
    }

    pub fn table(&self) -> FactorTable {
        let elements = self.group.enumerate();
        let complete = elements.len() < self.group.budget;
        FactorTable { elements, complete }
    }
}

/// Enumerated elements of one factor, identity first.
#[derive(Clone, Debug)]
pub struct FactorTable {
    pub elements: Vec<GroupElement>,
    /// The enumeration stopped because the group ran out, not the budget.
    pub complete: bool,
}

/// `(factor, element index)` with a nonzero index.
pub type TreeSyllable = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TreeVertex {
    /// `v(g)`, stabilizer trivial.
    Element { word: Vec<TreeSyllable> },
    /// `v(gH_i)`, stabilizer `gH_ig⁻¹`.
    Coset { prefix: Vec<TreeSyllable>, factor: usize },
}

impl TreeVertex {
    pub fn root() -> Self {
        TreeVertex::Element { word: Vec::new() }
    }

    /// Distance from `v(1)`.
    pub fn depth(&self) -> u64 {
        match self {
            TreeVertex::Element { word } => 2 * word.len() as u64,
            TreeVertex::Coset { prefix, .. } => 2 * prefix.len() as u64 + 1,
        }
    }

    pub fn is_coset(&self) -> bool {
        matches!(self, TreeVertex::Coset { .. })
    }

    fn syllables(&self) -> &[TreeSyllable] {
        match self {
            TreeVertex::Element { word } => word,
            TreeVertex::Coset { prefix, .. } => prefix,
        }
    }

    /// Factor of the coset vertex on the root path just after `v(prefix_c)`.
    fn step_after(&self, c: usize) -> Option<usize> {
        let s = self.syllables();
        match self {
            _ if s.len() > c => Some(s[c].0),
            TreeVertex::Coset { factor, .. } => Some(*factor),
            TreeVertex::Element { .. } => None,
        }
    }
}

/// Distance in the Bass-Serre tree.
pub fn tree_distance(u: &TreeVertex, v: &TreeVertex) -> u64 {
    let (a, b) = (u.syllables(), v.syllables());
    let c = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let mut meet = 2 * c as u64;
    if let (Some(f), Some(g)) = (u.step_after(c), v.step_after(c)) {
        if f == g {
            meet += 1;
        }
    }
    u.depth() + v.depth() - 2 * meet
}

/// The ball of a given radius about `v(1)`.
#[derive(Clone, Debug, Serialize)]
pub struct TreeBall {
    pub radius: u64,
    /// Enumerated elements per factor, identity included.
    pub factor_sizes: Vec<usize>,
    /// Breadth-first from the root.
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<(usize, usize)>,
    /// Coset vertices whose fan-out was cut by a factor's enumeration budget.
    pub truncated: Vec<usize>,
}

impl TreeBall {
    /// `sizes[i]` elements of factor `i` (including the identity); `complete[i]`
    /// says whether that is the whole factor.
    pub fn build(sizes: &[usize], complete: &[bool], radius: u64) -> Result<Self> {
        if sizes.is_empty() || sizes.len() != complete.len() || sizes.contains(&0) {
            return Err(invalid("need at least one factor, each with its identity"));
        }
        let mut vertices = vec![TreeVertex::root()];
        let mut edges = Vec::new();
        let mut truncated = Vec::new();
        let mut next = 0;
        while next < vertices.len() {
            let id = next;
            next += 1;
            let v = vertices[id].clone();
            if v.depth() >= radius {
                continue;
            }
            match v {
                TreeVertex::Element { word } => {
                    let last = word.last().map(|s| s.0);
                    for f in (0..sizes.len()).filter(|&f| Some(f) != last) {
                        edges.push((id, vertices.len()));
                        vertices.push(TreeVertex::Coset { prefix: word.clone(), factor: f });
                    }
                }
                TreeVertex::Coset { prefix, factor } => {
                    if !complete[factor] {
                        truncated.push(id);
                    }
                    for e in 1..sizes[factor] {
                        let mut word = prefix.clone();
                        word.push((factor, e));
                        edges.push((id, vertices.len()));
                        vertices.push(TreeVertex::Element { word });
                    }
                }
            }
        }
        Ok(TreeBall { radius, factor_sizes: sizes.to_vec(), vertices, edges, truncated })
    }

    pub fn coset_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(|&i| self.vertices[i].is_coset())
    }
}

pub fn build_ball(factors: &[FactorSpec], radius: u64) -> Result<TreeBall> {
    let tables: Vec<FactorTable> = factors.iter().map(FactorSpec::table).collect();
    let sizes: Vec<usize> = tables.iter().map(|t| t.elements.len()).collect();
    let complete: Vec<bool> = tables.iter().map(|t| t.complete).collect();
    TreeBall::build(&sizes, &complete, radius)
}

/// A ball with its image in the Farey graph.
#[derive(Clone, Debug, Serialize)]
pub struct LabeledBall {
    pub ball: TreeBall,
    pub base: Slope,
    /// `φ(v)`: `g·∂H_i` for `v(gH_i)` and `{g·ξ}` for `v(g)`, sorted.
    pub labels: Vec<Vec<Slope>>,
}

fn evaluate(tables: &[FactorTable], word: &[TreeSyllable]) -> MappingClass {
    word.iter().fold(MappingClass::identity(), |m, &(f, e)| &m * &tables[f].elements[e].matrix)
}

fn image(m: &MappingClass, slopes: &[Slope]) -> Vec<Slope> {
    slopes.iter().map(|s| m.act(s)).collect::<BTreeSet<_>>().into_iter().collect()
}

/// The equivariant map `φ`. Checks that every coset label is independent of the
/// representative: `gh·∂H_i = g·∂H_i` for each enumerated `h ∈ H_i`.
pub fn phi(ball: &TreeBall, factors: &[FactorSpec], base: &Slope) -> Result<LabeledBall> {
    let tables: Vec<FactorTable> = factors.iter().map(FactorSpec::table).collect();
    if tables.iter().map(|t| t.elements.len()).ne(ball.factor_sizes.iter().copied()) {
        return Err(invalid("ball was built for different factors"));
    }
    if let Some(i) = factors.iter().position(|f| f.boundary.is_empty()) {
        return Err(invalid(format!("factor {i} has an empty reducing multicurve")));
    }
    let mut labels = Vec::with_capacity(ball.vertices.len());
    for v in &ball.vertices {
        let label = match v {
            TreeVertex::Element { word } => vec![evaluate(&tables, word).act(base)],
            TreeVertex::Coset { prefix, factor } => {
                let g = evaluate(&tables, prefix);
                let label = image(&g, &factors[*factor].boundary);
                for h in &tables[*factor].elements[1..] {
                    if image(&(&g * &h.matrix), &factors[*factor].boundary) != label {
                        return Err(Error::ActionFailure(format!(
                            "factor {factor} element {:?} moves its reducing multicurve",
                            h.word
                        )));
                    }
                }
                label
            }
        };
        labels.push(label);
    }
    Ok(LabeledBall { ball: ball.clone(), base: base.clone(), labels })
}

/// Diameter of `a ∪ b`.
pub fn union_diameter<O: DistanceOracle>(o: &O, a: &[O::Point], b: &[O::Point]) -> Result<u64> {
    let all: Vec<&O::Point> = a.iter().chain(b).collect();
    let mut best = 0;
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            best = best.max(o.dist(all[i], all[j])?);
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct QiPair {
    pub u: usize,
    pub v: usize,
    pub d_tree: u64,
    pub d_curve: u64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AffineBound {
    pub slope: f64,
    pub intercept: f64,
}

/// Everything in a [`QiReport`] except the pairs themselves.
#[derive(Clone, Debug, Serialize)]
pub struct QiSummary {
    pub pairs: u64,
    /// Least `d_S / d_T` over pairs.
    pub min_ratio: Option<f64>,
    /// Least-squares line through the lower envelope of `(d_T, d_S)`, shifted down
    /// until it lies below every pair.
    pub affine_bound: Option<AffineBound>,
    /// Least `κ` with `d_S ≥ d_T/κ − κ` on every pair.
    pub kappa_witness: f64,
    /// Verdict at a requested `κ`.
    pub kappa_pass: Option<bool>,
    /// `d_S ≥ d_T/2 − 4` on every pair.
    pub half_minus_four: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct QiReport {
    pub pairs: Vec<QiPair>,
    pub summary: QiSummary,
}

/// Scan all pairs of coset vertices in the ball, handing each to `sink` as it is
/// computed so that large balls never hold every pair at once.
pub fn qi_scan<O: DistanceOracle<Point = Slope>>(
    labeled: &LabeledBall,
    o: &O,
    kappa: Option<f64>,
    mut sink: impl FnMut(&QiPair),
) -> Result<QiSummary> {
    let cosets: Vec<usize> = labeled.ball.coset_vertices().collect();
    let mut summary = QiSummary {
        pairs: 0,
        min_ratio: None,
        affine_bound: None,
        kappa_witness: 0.0,
        kappa_pass: kappa.map(|_| true),
        half_minus_four: true,
    };
    // Least d_S at each d_T.
    let mut envelope = BTreeMap::<u64, u64>::new();
    for (a, &u) in cosets.iter().enumerate() {
        for &v in &cosets[a + 1..] {
            let p = QiPair {
                u,
                v,
                d_tree: tree_distance(&labeled.ball.vertices[u], &labeled.ball.vertices[v]),
                d_curve: union_diameter(o, &labeled.labels[u], &labeled.labels[v])?,
            };
            let (s, t) = (p.d_curve as f64, p.d_tree as f64);
            summary.pairs += 1;
            summary.min_ratio = Some(summary.min_ratio.map_or(s / t, |m| m.min(s / t)));
            summary.kappa_witness = summary.kappa_witness.max((-s + (s * s + 4.0 * t).sqrt()) / 2.0);
            if let (Some(k), Some(ok)) = (kappa, summary.kappa_pass.as_mut()) {
                *ok &= s >= t / k - k;
            }
            summary.half_minus_four &= 2 * p.d_curve + 8 >= p.d_tree;
            let e = envelope.entry(p.d_tree).or_insert(p.d_curve);
            *e = (*e).min(p.d_curve);
            sink(&p);
        }
    }
    summary.affine_bound = lower_affine_bound(&envelope);
    Ok(summary)
}

pub fn qi_certificate<O: DistanceOracle<Point = Slope>>(
    labeled: &LabeledBall,
    o: &O,
    kappa: Option<f64>,
) -> Result<QiReport> {
    let mut pairs = Vec::new();
    let summary = qi_scan(labeled, o, kappa, |p| pairs.push(p.clone()))?;
    Ok(QiReport { pairs, summary })
}

fn lower_affine_bound(envelope: &BTreeMap<u64, u64>) -> Option<AffineBound> {
    if envelope.len() < 2 {
        return None;
    }
    let n = envelope.len() as f64;
    let (sx, sy) = envelope.iter().fold((0.0, 0.0), |(a, b), (&x, &y)| (a + x as f64, b + y as f64));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = envelope.iter().fold((0.0, 0.0), |(a, b), (&x, &y)| {
        let dx = x as f64 - mx;
        (a + dx * (y as f64 - my), b + dx * dx)
    });
    let slope = sxy / sxx;
    let intercept = envelope.iter().map(|(&x, &y)| y as f64 - slope * x as f64).fold(f64::INFINITY, f64::min);
    Some(AffineBound { slope, intercept })
}

/// How a product is compared with the identity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityMode {
    /// `±I` both count as trivial, as they do on curves.
    #[default]
    Projective,
    /// Only `I` is trivial.
    Strict,
}

impl IdentityMode {
    pub fn is_trivial(self, m: &MappingClass) -> bool {
        match self {
            IdentityMode::Projective => m.is_central(),
            IdentityMode::Strict => m.is_identity(),
        }
    }
}

/// Words considered by [`free_product_check`]: at most `syllables` syllables,
/// each an enumerated factor element spelled with at most `syllable_letters` letters.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WordBudget {
    pub syllables: usize,
    pub syllable_letters: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorSyllable {
    pub factor: usize,
    /// Spelling in the factor's generators.
    pub word: Vec<Letter>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FreeProductReport {
    pub no_relation: bool,
    /// Fewest syllables, then fewest letters, then first in enumeration order.
    pub witness: Option<Vec<FactorSyllable>>,
    pub words_checked: u64,
}

/// Search alternating words for one that evaluates to the identity.
pub fn free_product_check(factors: &[FactorSpec], budget: WordBudget, mode: IdentityMode) -> FreeProductReport {
    let choices: Vec<Vec<GroupElement>> = factors
        .iter()
        .map(|f| {
            let mut t = f.table().elements;
            t.remove(0);
            t.retain(|e| e.word.len() <= budget.syllable_letters);
            t
        })
        .collect();
    let mut checked = 0;
    for len in 1..=budget.syllables {
        let mut best: Option<(usize, Vec<(usize, usize)>)> = None;
        let mut path = Vec::with_capacity(len);
        search(&choices, mode, len, &MappingClass::identity(), &mut path, 0, &mut checked, &mut best);
        if let Some((_, w)) = best {
            let witness =
                w.into_iter().map(|(f, e)| FactorSyllable { factor: f, word: choices[f][e].word.clone() }).collect();
            return FreeProductReport { no_relation: false, witness: Some(witness), words_checked: checked };
        }
    }
    FreeProductReport { no_relation: true, witness: None, words_checked: checked }
}

#[allow(clippy::too_many_arguments)]
fn search(
    choices: &[Vec<GroupElement>],
    mode: IdentityMode,
    len: usize,
    prefix: &MappingClass,
    path: &mut Vec<(usize, usize)>,
    letters: usize,
    checked: &mut u64,
    best: &mut Option<(usize, Vec<(usize, usize)>)>,
) {
    if path.len() == len {
        *checked += 1;
        if mode.is_trivial(prefix) && best.as_ref().is_none_or(|(l, _)| letters < *l) {
            *best = Some((letters, path.clone()));
        }
        return;
    }
    let last = path.last().map(|s| s.0);
    for (f, elems) in choices.iter().enumerate() {
        if Some(f) == last {
            continue;
        }
        for (e, el) in elems.iter().enumerate() {
            path.push((f, e));
            search(choices, mode, len, &(prefix * &el.matrix), path, letters + el.word.len(), checked, best);
            path.pop();
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LoxodromicReport {
    pub scanned: usize,
    /// Words whose cyclic reduction has at most one syllable.
    pub excluded: usize,
    pub pseudo_anosov: usize,
    /// Cyclically reduced words with `|trace| ≤ 2`, with their traces.
    pub failures: Vec<(Vec<TreeSyllable>, String)>,
}

/// Cyclic reduction of an alternating word, merging the end syllables into a
/// matrix when they share a factor.
fn cyclic_reduction(tables: &[FactorTable], word: &[TreeSyllable], mode: IdentityMode) -> Vec<(usize, MappingClass)> {
    let mut w: Vec<(usize, MappingClass)> =
        word.iter().map(|&(f, e)| (f, tables[f].elements[e].matrix.clone())).collect();
    while w.len() >= 2 && w[0].0 == w[w.len() - 1].0 {
        let (f, last) = w.pop().expect("nonempty");
        let merged = &last * &w[0].1;
        if mode.is_trivial(&merged) {
            w.remove(0);
        } else {
            w[0] = (f, merged);
        }
    }
    w
}

/// Every word not conjugate into a factor should act hyperbolically.
pub fn loxodromic_scan(factors: &[FactorSpec], words: &[Vec<TreeSyllable>]) -> Result<LoxodromicReport> {
    let tables: Vec<FactorTable> = factors.iter().map(FactorSpec::table).collect();
    let mut report = LoxodromicReport { scanned: words.len(), excluded: 0, pseudo_anosov: 0, failures: Vec::new() };
    for w in words {
        if w.iter().any(|&(f, e)| f >= tables.len() || e == 0 || e >= tables[f].elements.len())
            || w.windows(2).any(|p| p[0].0 == p[1].0)
        {
            return Err(Error::MalformedWord(format!("{w:?} is not an alternating word over the factors")));
        }
        let red = cyclic_reduction(&tables, w, IdentityMode::Projective);
        if red.len() <= 1 {
            report.excluded += 1;
            continue;
        }
        let m = red.iter().fold(MappingClass::identity(), |acc, (_, x)| &acc * x);
        let tr = m.trace();
        if tr.magnitude() > &2u32.into() {
            report.pseudo_anosov += 1;
        } else {
            report.failures.push((w.clone(), tr.to_string()));
        }
    }
    Ok(report)
}

/// Random alternating words with `2..=max_syllables` syllables whose first and
/// last factors differ, hence cyclically reduced.
pub fn random_cyclic_words(
    sizes: &[usize],
    count: usize,
    max_syllables: usize,
    seed: u64,
) -> Result<Vec<Vec<TreeSyllable>>> {
    if sizes.iter().filter(|&&s| s > 1).count() < 2 || max_syllables < 2 {
        return Err(invalid("need two nontrivial factors and at least two syllables"));
    }
    let mut r = rng::derived(seed, "cyclic-words");
    let live: Vec<usize> = (0..sizes.len()).filter(|&f| sizes[f] > 1).collect();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let len = r.random_range(2..=max_syllables);
        let mut w: Vec<TreeSyllable> = Vec::with_capacity(len);
        for _ in 0..len {
            let f = loop {
                let f = live[r.random_range(0..live.len())];
                if w.last().map(|s| s.0) != Some(f) {
                    break f;
                }
            };
            w.push((f, r.random_range(1..sizes[f])));
        }
        if w[0].0 != w[len - 1].0 {
            out.push(w);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::twist_about;
    use crate::hypgraph::FareyMetric;

    fn sl(s: &str) -> Slope {
        s.parse().unwrap()
    }

    fn pair(n: i64) -> Vec<FactorSpec> {
        vec![
            FactorSpec::cyclic(MappingClass::new(1, n, 0, 1).unwrap(), vec![Slope::infinity()], 3),
            FactorSpec::cyclic(MappingClass::new(1, 0, n, 1).unwrap(), vec![sl("0/1")], 3),
        ]
    }

    #[test]
    fn small_balls() {
        let b = TreeBall::build(&[3, 3], &[false, false], 0).unwrap();
        assert_eq!(b.vertices, vec![TreeVertex::root()]);
        // Radius 2: root, two cosets, two non-identity elements under each.
        let b = TreeBall::build(&[3, 3], &[false, false], 2).unwrap();
        assert_eq!(b.vertices.len(), 1 + 2 + 4);
        assert_eq!(b.edges.len(), b.vertices.len() - 1);
        assert_eq!(b.truncated.len(), 2);
        // Radius 4 adds one new coset per element and two elements under each.
        let b = TreeBall::build(&[3, 3], &[true, true], 4).unwrap();
        assert_eq!(b.vertices.len(), 7 + 4 + 8);
        assert!(b.truncated.is_empty());
    }

    #[test]
    fn distances() {
        let c = |p: Vec<TreeSyllable>, f| TreeVertex::Coset { prefix: p, factor: f };
        let e = |w: Vec<TreeSyllable>| TreeVertex::Element { word: w };
        assert_eq!(tree_distance(&c(vec![], 0), &c(vec![], 1)), 2);
        assert_eq!(tree_distance(&e(vec![(0, 1)]), &e(vec![(0, 2)])), 2);
        assert_eq!(tree_distance(&e(vec![(0, 1)]), &c(vec![], 0)), 1);
        assert_eq!(tree_distance(&e(vec![(0, 1), (1, 1)]), &c(vec![(0, 2)], 1)), 5);
        assert_eq!(tree_distance(&c(vec![(0, 1)], 1), &c(vec![(0, 1)], 1)), 0);
    }

    #[test]
    fn labels_at_the_root_are_the_reducing_curves() {
        let f = pair(2);
        let ball = build_ball(&f, 3).unwrap();
        let lab = phi(&ball, &f, &sl("1/2")).unwrap();
        let root_coset =
            ball.vertices.iter().position(|v| *v == TreeVertex::Coset { prefix: vec![], factor: 1 }).unwrap();
        assert_eq!(lab.labels[root_coset], vec![sl("0/1")]);
        assert_eq!(lab.labels[0], vec![sl("1/2")]);
    }

    #[test]
    fn moved_boundary_is_an_action_failure() {
        let f = vec![
            FactorSpec::cyclic(MappingClass::twist_at_infinity(1), vec![sl("0/1")], 1),
            FactorSpec::cyclic(twist_about(&sl("0/1"), 1), vec![sl("0/1")], 1),
        ];
        let ball = build_ball(&f, 1).unwrap();
        assert!(matches!(phi(&ball, &f, &sl("1/2")), Err(Error::ActionFailure(_))));
    }

    #[test]
    fn one_pair_ratio() {
        // Two root cosets at tree distance 2 with labels 1/0 and 0/1 at distance 1.
        let f = pair(2);
        let ball = build_ball(&f, 1).unwrap();
        let rep = qi_certificate(&phi(&ball, &f, &sl("1/2")).unwrap(), &FareyMetric, Some(1.0)).unwrap();
        assert_eq!(rep.pairs.len(), 1);
        assert_eq!((rep.pairs[0].d_tree, rep.pairs[0].d_curve), (2, 1));
        assert_eq!(rep.summary.min_ratio, Some(0.5));
        assert_eq!(rep.summary.kappa_pass, Some(true));
        assert!(rep.summary.half_minus_four);
    }

    #[test]
    fn classical_pairs() {
        let b = WordBudget { syllables: 6, syllable_letters: 2 };
        let r = free_product_check(&pair(1), b, IdentityMode::Projective);
        assert!(!r.no_relation);
        let r = free_product_check(&pair(2), b, IdentityMode::Projective);
        assert!(r.no_relation);
        assert!(free_product_check(&pair(2)[..1], b, IdentityMode::Projective).no_relation);
    }

    #[test]
    fn cyclic_reduction_excludes_conjugates() {
        let f = pair(2);
        let words = vec![vec![(0, 1), (1, 1), (0, 2)], vec![(0, 1), (1, 1)]];
        let r = loxodromic_scan(&f, &words).unwrap();
        assert_eq!(r.excluded, 1);
        assert_eq!(r.pseudo_anosov, 1);
    }
}
