//! Tree balls against breadth-first search and the syllable formula, the
//! equivariance of the orbit map, and the behaviour of the certificates on
//! free and non-free families.

use proptest::prelude::*;
use rgf_core::bassserre::*;
use rgf_core::constructions::{example92_generate, prop91_generate, slope_at_distance};
use rgf_core::farey::twist_about;
use rgf_core::hypgraph::FareyMetric;
use rgf_core::{MappingClass, Slope};
use std::collections::{HashMap, VecDeque};

fn sl(s: &str) -> Slope {
    s.parse().unwrap()
}

fn z_star_z(power: usize) -> Vec<FactorSpec> {
    vec![
        FactorSpec::cyclic(MappingClass::new(1, 2, 0, 1).unwrap(), vec![Slope::infinity()], power),
        FactorSpec::cyclic(MappingClass::new(1, 0, 2, 1).unwrap(), vec![sl("0/1")], power),
    ]
}

fn bfs(ball: &TreeBall, src: usize) -> Vec<u64> {
    let mut adj = vec![Vec::new(); ball.vertices.len()];
    for &(a, b) in &ball.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut dist = vec![u64::MAX; adj.len()];
    dist[src] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if dist[v] == u64::MAX {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }
    dist
}

/// Syllable length of `g⁻¹g'`: strip the common prefix, and merge the next
/// syllables when they come from the same factor.
fn syllable_distance(a: &[TreeSyllable], b: &[TreeSyllable]) -> u64 {
    let c = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let (ra, rb) = (a.len() - c, b.len() - c);
    let merged = ra > 0 && rb > 0 && a[c].0 == b[c].0;
    (ra + rb - usize::from(merged)) as u64
}

#[test]
fn tree_distances_match_search_and_syllables() {
    let ball = build_ball(&z_star_z(3), 6).unwrap();
    assert!(ball.vertices.len() > 100);
    for u in 0..ball.vertices.len() {
        let d = bfs(&ball, u);
        for (y, &dv) in ball.vertices.iter().zip(&d) {
            let x = &ball.vertices[u];
            assert_eq!(tree_distance(x, y), dv, "{x:?} {y:?}");
            if let (TreeVertex::Element { word: a }, TreeVertex::Element { word: b }) = (x, y) {
                assert_eq!(dv, 2 * syllable_distance(a, b));
            }
        }
    }
}

#[test]
fn ball_is_bipartite_and_within_radius() {
    let ball = build_ball(&z_star_z(2), 5).unwrap();
    for &(a, b) in &ball.edges {
        assert_ne!(ball.vertices[a].is_coset(), ball.vertices[b].is_coset());
    }
    assert!(ball.vertices.iter().all(|v| v.depth() <= 5));
    // Element v(g) meets every coset v(gH_i).
    let root = bfs(&ball, 0);
    assert_eq!(root.iter().filter(|&&d| d == 1).count(), 2);
}

/// `φ(h·v) = h·φ(v)` wherever `h·v` is again in the ball.
#[test]
fn orbit_map_is_equivariant() {
    let factors = z_star_z(2);
    let base = sl("2/5");
    let ball = build_ball(&factors, 6).unwrap();
    let lab = phi(&ball, &factors, &base).unwrap();
    let index: HashMap<&TreeVertex, usize> = ball.vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let tables: Vec<FactorTable> = factors.iter().map(FactorSpec::table).collect();
    let lookup = |f: usize, m: &MappingClass| tables[f].elements.iter().position(|e| e.matrix.projectively_eq(m));
    let mut checked = 0;
    for (f, t) in tables.iter().enumerate() {
        for h in &t.elements[1..] {
            for (v, vertex) in ball.vertices.iter().enumerate() {
                let (syl, coset) = match vertex {
                    TreeVertex::Element { word } => (word.clone(), None),
                    TreeVertex::Coset { prefix, factor } => (prefix.clone(), Some(*factor)),
                };
                let mut moved = syl.clone();
                if moved.first().is_some_and(|s| s.0 == f) {
                    let prod = &h.matrix * &tables[f].elements[moved[0].1].matrix;
                    match lookup(f, &prod) {
                        Some(0) => {
                            moved.remove(0);
                        }
                        Some(e) => moved[0] = (f, e),
                        None => continue,
                    }
                } else {
                    let e = lookup(f, &h.matrix).unwrap();
                    moved.insert(0, (f, e));
                }
                let image = match coset {
                    None => TreeVertex::Element { word: moved },
                    // A coset whose prefix now ends in its own factor absorbs that syllable.
                    Some(c) if moved.last().is_some_and(|s| s.0 == c) => {
                        moved.pop();
                        TreeVertex::Coset { prefix: moved, factor: c }
                    }
                    Some(c) => TreeVertex::Coset { prefix: moved, factor: c },
                };
                let Some(&w) = index.get(&image) else { continue };
                let mut expected: Vec<Slope> = lab.labels[v].iter().map(|s| h.matrix.act(s)).collect();
                expected.sort();
                assert_eq!(lab.labels[w], expected, "{vertex:?} -> {image:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn kappa_witness_grows_with_radius() {
    let fam = prop91_generate(12, &Slope::infinity(), -1..=1, 4, 2).unwrap();
    let mut last = 0.0;
    for r in 1..=5 {
        let ball = build_ball(&fam.family.factors, r).unwrap();
        let q =
            qi_certificate(&phi(&ball, &fam.family.factors, &Slope::infinity()).unwrap(), &FareyMetric, None).unwrap();
        assert!(q.summary.kappa_witness >= last);
        last = q.summary.kappa_witness;
    }
}

/// In the non-free triple, `v(H_3)` and `v(T·H_2)` both map to `Tβ` (tree distance
/// 4), and `v(T t_β·H_3)`, `v((T t_β T⁻¹)T·H_3)` collide at tree distance 10.
/// Collapsed pairs keep appearing farther apart, so `κ` keeps growing.
#[test]
fn non_free_triple_has_no_linear_lower_bound() {
    let a = Slope::infinity();
    let b = slope_at_distance(&a, 5).unwrap();
    let ex = example92_generate(5, &a, &b, 4, 4).unwrap();
    let f = &ex.family.factors;
    let kappa = |r| {
        let ball = build_ball(f, r).unwrap();
        qi_certificate(&phi(&ball, f, &a).unwrap(), &FareyMetric, None).unwrap()
    };
    let (small, large) = (kappa(3), kappa(5));
    assert_eq!(small.summary.kappa_witness, 2.0);
    assert_eq!(large.summary.kappa_witness, 10f64.sqrt());
    assert_eq!(small.summary.min_ratio, Some(0.0));
    assert_eq!(large.summary.min_ratio, Some(0.0));
}

#[test]
fn separated_twists_multiply_to_pseudo_anosovs() {
    let f = vec![
        FactorSpec::cyclic(twist_about(&sl("1/0"), 1), vec![sl("1/0")], 2),
        FactorSpec::cyclic(twist_about(&sl("3/7"), 1), vec![sl("3/7")], 2),
    ];
    let r = loxodromic_scan(&f, &[vec![(0, 1), (1, 1)]]).unwrap();
    assert_eq!(r.pseudo_anosov, 1);
}

#[test]
fn random_words_over_a_separated_family_are_pseudo_anosov() {
    let fam = prop91_generate(12, &Slope::infinity(), -1..=1, 4, 3).unwrap();
    let sizes: Vec<usize> = fam.family.factors.iter().map(|f| f.table().elements.len()).collect();
    let words = random_cyclic_words(&sizes, 100, 6, 3).unwrap();
    let r = loxodromic_scan(&fam.family.factors, &words).unwrap();
    assert_eq!(r.pseudo_anosov, 100);
    assert!(r.failures.is_empty());
}

fn parabolic() -> impl Strategy<Value = (i64, i64, i64)> {
    // A twist about p/q to power n.
    (-4i64..=4, 1i64..=4, prop_oneof![Just(1i64), Just(2), Just(-1)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn free_product_verdict_ignores_order_and_inversion(a in parabolic(), b in parabolic(), flip in any::<bool>()) {
        let mk = |(p, q, n): (i64, i64, i64), inv: bool| {
            let s = Slope::new(p, q).unwrap();
            let g = twist_about(&s, n);
            FactorSpec::cyclic(if inv { g.inverse() } else { g }, vec![s], 2)
        };
        prop_assume!(Slope::new(a.0, a.1).unwrap() != Slope::new(b.0, b.1).unwrap());
        let budget = WordBudget { syllables: 5, syllable_letters: 2 };
        let one = free_product_check(&[mk(a, false), mk(b, false)], budget, IdentityMode::Projective);
        let two = free_product_check(&[mk(b, flip), mk(a, !flip)], budget, IdentityMode::Projective);
        prop_assert_eq!(one.no_relation, two.no_relation);
    }
}
