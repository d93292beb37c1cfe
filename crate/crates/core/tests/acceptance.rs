//! Acceptance criteria 1–12. Each criterion runs on its own thread and reports
//! one line; the test fails if any line says FAIL.

use rand::Rng as _;
use rgf_core::bassserre::{
    build_ball, free_product_check, loxodromic_scan, phi, qi_certificate, random_cyclic_words, FactorSpec,
    IdentityMode, WordBudget,
};
use rgf_core::constructions::{
    check_misaligned, check_separated, example92_generate, prop91_generate, slope_at_distance,
};
use rgf_core::experiments::{run_example92, run_prop91, run_theorem_b, Example92Config, Prop91Config, TheoremBConfig};
use rgf_core::farey::oracle::BoundedFarey;
use rgf_core::farey::{annular_distance, farey_distance, random_slope, twist_about};
use rgf_core::hypgraph::{
    check_geodesic_sandwich, check_gp_stability, check_local_to_global, estimate_delta, FareyMetric, FiniteGraph,
};
use rgf_core::projections::{
    behrstock_scan, general_persistence_check, persistence_check, sample_torus_triples, synthetic_instance,
    torus_twist_sequence, SyntheticSpec, TorusAnnuli,
};
use rgf_core::raag::{components, normal_form, rewrite_with};
use rgf_core::report::json_lines;
use rgf_core::rng::{derived, seeded};
use rgf_core::{HalfInt, MappingClass, RaagGraph, Slope, Word};
use serde_json::Value;
use std::time::{Duration, Instant};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn delta() -> HalfInt {
    HalfInt::from_int(1)
}

/// Farey distance against breadth-first search in bounded Farey graphs.
fn criterion_1() -> Verdict {
    let start = Instant::now();
    let inner = BoundedFarey::new(21);
    let mid = BoundedFarey::new(42);
    let outer = BoundedFarey::new(84);
    let slopes: Vec<Slope> = inner.slopes().collect();
    let (mut pairs, mut bad) = (0u64, 0u64);
    for a in &slopes {
        let dm = mid.distances_from(a).expect("slope in graph");
        let dout = outer.distances_from(a).expect("slope in graph");
        for b in &slopes {
            let m = dm[mid.index_of(b).unwrap()];
            let o = dout[outer.index_of(b).unwrap()];
            pairs += 1;
            if m != o || o != Some(farey_distance(a, b)) {
                bad += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        bad == 0 && secs < 120.0,
        format!("{pairs} pairs over {} slopes, {bad} mismatches, {secs:.1}s", slopes.len()),
    )
}

/// Four-point δ on trees and the 4-cycle, then stability and the geodesic sandwich on Farey triples.
fn criterion_2() -> Verdict {
    let mut trees_ok = true;
    for seed in 0..50 {
        let t = FiniteGraph::random_tree(25, seed).unwrap();
        trees_ok &= estimate_delta(&t, &t.vertices(), u64::MAX, seed).unwrap().delta == HalfInt::from_int(0);
    }
    let c4 = FiniteGraph::cycle(4).unwrap();
    let c4_delta = estimate_delta(&c4, &c4.vertices(), u64::MAX, 0).unwrap();
    let mut r = seeded(2);
    let mut failures = 0;
    for _ in 0..10_000 {
        let [x, y, z, w] = std::array::from_fn(|_| random_slope(&mut r, 2_000));
        if !check_gp_stability(&FareyMetric, &x, &y, &w, &z).unwrap()
            || !check_geodesic_sandwich(&FareyMetric, &x, &y, &z, delta()).unwrap().ok
        {
            failures += 1;
        }
    }
    let pass = trees_ok && c4_delta.delta == HalfInt::from_int(1) && c4_delta.exhaustive && failures == 0;
    verdict(pass, format!("trees δ=0: {trees_ok}, C4 δ={}, Farey failures {failures}/10000", c4_delta.delta))
}

/// Chains built by twisting, checked by the local-to-global principle with A = 2, δ = 1.
fn criterion_3() -> Verdict {
    let start = Instant::now();
    let a = HalfInt::from_int(2);
    let mut r = seeded(3);
    let (mut kept, mut failed) = (0, 0);
    for _ in 0..1_000 {
        let x0 = random_slope(&mut r, 200);
        let len = r.random_range(33u64..=40);
        // Move the far endpoint off the canonical ladder by a twist about x0.
        let x1 = twist_about(&x0, r.random_range(-5i64..=5)).act(&slope_at_distance(&x0, len).unwrap());
        let k = r.random_range(3i64..=20) * if r.random_bool(0.5) { 1 } else { -1 };
        let points = r.random_range(3usize..=6);
        let mut chain = vec![x0, x1];
        while chain.len() < points {
            let n = chain.len();
            let next = twist_about(&chain[n - 1], k).act(&chain[n - 2]);
            chain.push(next);
        }
        let rep = check_local_to_global(&FareyMetric, &chain, a, delta(), true).unwrap();
        if rep.hypothesis_ok {
            kept += 1;
            if !(rep.conclusion_ok && rep.geodesic_ok == Some(true)) {
                failed += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        kept >= 900 && failed == 0 && secs < 60.0,
        format!("{kept}/1000 chains meet the hypothesis, {failed} fail the conclusion, {secs:.1}s"),
    )
}

/// Twisting n times moves every other slope at least |n| in the annulus.
fn criterion_4() -> Verdict {
    let mut r = seeded(4);
    let (mut checked, mut worst) = (0u64, i64::MAX);
    for _ in 0..1_000 {
        let alpha = random_slope(&mut r, 1_000);
        let beta = loop {
            let b = random_slope(&mut r, 1_000);
            if b != alpha {
                break b;
            }
        };
        for n in -100i64..=100 {
            let d = annular_distance(&alpha, &twist_about(&alpha, n).act(&beta), &beta).unwrap();
            worst = worst.min(d as i64 - n.abs());
            checked += 1;
        }
    }
    verdict(worst >= 0, format!("{checked} twists, least d − |n| = {worst}"))
}

/// Behrstock constant: estimate on one sample, revalidate on a fresh one.
fn criterion_5() -> Verdict {
    let sys = TorusAnnuli::default();
    let first = sample_torus_triples(&mut derived(5, "estimate"), 100_000);
    let b_emp = behrstock_scan(&sys, &first, u64::MAX).b_emp;
    let fresh = sample_torus_triples(&mut derived(5, "revalidate"), 100_000);
    let rep = behrstock_scan(&sys, &fresh, b_emp);
    verdict(
        rep.violations == 0,
        format!("B_emp = {b_emp} (reference value 10), {} violations on a fresh 10^5 sample", rep.violations),
    )
}

/// Persistence on torus twist sequences and on synthetic systems.
fn criterion_6() -> Verdict {
    let sys = TorusAnnuli::default();
    let c = sys.constants;
    let mut r = seeded(6);
    let mut torus_bad = 0;
    for _ in 0..200 {
        let a0 = random_slope(&mut r, 50);
        let a1 = loop {
            let s = random_slope(&mut r, 50);
            if farey_distance(&a0, &s) >= 3 {
                break s;
            }
        };
        let k = r.random_range(11i64..=30);
        let len = r.random_range(3usize..=10);
        let seq = torus_twist_sequence(&a0, &a1, k, len);
        let rep = persistence_check(&sys, &seq, c.m, c.b);
        if !(rep.hypothesis_ok && rep.conclusions_ok && rep.final_distance_ok == Some(true)) {
            torus_bad += 1;
        }
    }
    let mut synthetic_bad = 0;
    for seed in 0..200 {
        let spec = SyntheticSpec { spine: 14, extra: 10, threshold: 13, min_step: 2, max_step: 3 };
        let inst = synthetic_instance(spec, seed).unwrap();
        let k = inst.system.constants;
        let rep = general_persistence_check(&inst.system, &inst.sequence, k.m, k.b);
        if !(rep.hypothesis_ok && rep.conclusions_ok) {
            synthetic_bad += 1;
        }
    }
    verdict(
        torus_bad == 0 && synthetic_bad == 0,
        format!("torus failures {torus_bad}/200, synthetic failures {synthetic_bad}/200"),
    )
}

fn random_graph(r: &mut impl rand::Rng, n: usize) -> RaagGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if r.random_bool(0.5) {
                edges.push((a, b));
            }
        }
    }
    RaagGraph::new(n, &edges).unwrap()
}

/// Confluence, inverses and components in right-angled Artin groups.
fn criterion_7() -> Verdict {
    let mut r = seeded(7);
    let (mut diverged, mut nontrivial) = (0, 0);
    for _ in 0..10_000 {
        let n = r.random_range(1..=6);
        let g = random_graph(&mut r, n);
        let len = r.random_range(0..12);
        let w = Word::new((0..len).map(|_| (r.random_range(0..n), r.random_range(-2i64..=2))));
        let nf = normal_form(&g, &w).unwrap();
        let mut pick = seeded(r.random());
        let by_rules = rewrite_with(&g, &w, |opts| pick.random_range(0..opts.len())).unwrap();
        diverged += usize::from(normal_form(&g, &by_rules).unwrap() != nf);
        nontrivial += usize::from(!normal_form(&g, &w.concat(&w.inverse())).unwrap().is_empty());
    }
    let mut wrong_components = 0;
    for _ in 0..1_000 {
        let n = r.random_range(1..=12);
        let g = random_graph(&mut r, n);
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                p[x] = find(p, p[x]);
            }
            p[x]
        }
        for (a, b) in g.edges() {
            let (x, y) = (find(&mut parent, a), find(&mut parent, b));
            parent[x] = y;
        }
        let comps = components(&g);
        let mut seen = vec![false; n];
        let mut ok = true;
        for c in &comps {
            for &v in c {
                ok &= !seen[v];
                seen[v] = true;
                ok &= find(&mut parent, v) == find(&mut parent, c[0]);
            }
        }
        let roots = (0..n).filter(|&v| find(&mut parent, v) == v).count();
        ok &= seen.iter().all(|&s| s) && roots == comps.len();
        wrong_components += usize::from(!ok);
    }
    verdict(
        diverged == 0 && nontrivial == 0 && wrong_components == 0,
        format!("{diverged} divergent schedules, {nontrivial} nontrivial w·w⁻¹, {wrong_components} wrong partitions"),
    )
}

/// Separation and misalignment of the generated family.
fn criterion_8() -> Verdict {
    let fam = prop91_generate(20, &Slope::infinity(), -2..=2, 4, 2).unwrap();
    let sep = check_separated(&fam.family, 34);
    let mut lo = u64::MAX;
    let mut hi = 0;
    for (i, row) in sep.matrix.iter().enumerate() {
        for (j, &d) in row.iter().enumerate() {
            if i != j {
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
    }
    let mis = check_misaligned(&fam.family, HalfInt::from_int(12));
    verdict(
        (34..=44).contains(&lo) && (34..=44).contains(&hi) && mis.pass,
        format!("separations in [{lo}, {hi}], misalignment min {}", mis.min.map_or("-".into(), |m| m.to_string())),
    )
}

/// Free product, quasi-isometric orbit map and pseudo-Anosov products for three factors.
fn criterion_9() -> Verdict {
    let start = Instant::now();
    let fam = prop91_generate(20, &Slope::infinity(), -1..=1, 4, 2).unwrap();
    let f = &fam.family.factors;
    let fp = free_product_check(f, WordBudget { syllables: 8, syllable_letters: 1 }, IdentityMode::Projective);
    let ball = build_ball(f, 6).unwrap();
    let qi = qi_certificate(&phi(&ball, f, &Slope::infinity()).unwrap(), &FareyMetric, None).unwrap();
    let words = random_cyclic_words(&ball.factor_sizes, 100, 6, 9).unwrap();
    let lox = loxodromic_scan(f, &words).unwrap();
    let secs = start.elapsed().as_secs_f64();
    verdict(
        fp.no_relation && qi.summary.half_minus_four && lox.pseudo_anosov == 100 && secs < 600.0,
        format!(
            "no relation in {} words: {}, QI over {} pairs: {}, pseudo-Anosov {}/100, {secs:.1}s",
            fp.words_checked,
            fp.no_relation,
            qi.pairs.len(),
            qi.summary.half_minus_four,
            lox.pseudo_anosov
        ),
    )
}

/// Separated but not misaligned, and a short relation exists.
fn criterion_10() -> Verdict {
    let alpha = Slope::infinity();
    let beta = slope_at_distance(&alpha, 5).unwrap();
    let ex = example92_generate(5, &alpha, &beta, 4, 6).unwrap();
    let mis = check_misaligned(&ex.family, HalfInt::from_int(2));
    let min = mis.min.unwrap_or(HalfInt::from_int(i64::MAX / 4));
    let witness = ex.free_product.witness.as_ref().map(Vec::len);
    verdict(
        ex.separation.pass && !mis.pass && min <= HalfInt::from_int(3) && witness.is_some_and(|l| l <= 6),
        format!("separated: {}, misalignment min {min}, witness syllables {witness:?}", ex.separation.pass),
    )
}

fn pair(n: i64, power: usize) -> Vec<FactorSpec> {
    vec![
        FactorSpec::cyclic(MappingClass::new(1, n, 0, 1).unwrap(), vec![Slope::infinity()], power),
        FactorSpec::cyclic(MappingClass::new(1, 0, n, 1).unwrap(), vec![Slope::integer(0)], power),
    ]
}

/// The classical pair: free at 2, not free at 1.
fn criterion_11() -> Verdict {
    let mode = IdentityMode::Projective;
    let free1 = free_product_check(&pair(2, 1), WordBudget { syllables: 10, syllable_letters: 1 }, mode);
    let free2 = free_product_check(&pair(2, 2), WordBudget { syllables: 10, syllable_letters: 2 }, mode);
    let rel = free_product_check(&pair(1, 2), WordBudget { syllables: 10, syllable_letters: 2 }, mode);
    let letters = rel.witness.as_ref().map(|w| w.iter().map(|s| s.word.len()).sum::<usize>());
    verdict(
        free1.no_relation && free2.no_relation && letters.is_some_and(|l| l <= 12),
        format!(
            "Pair(2) free over {} words, Pair(1) witness letters {letters:?}",
            free1.words_checked + free2.words_checked
        ),
    )
}

/// Every experiment reproduces its output byte for byte.
fn criterion_12() -> Verdict {
    let prop = Prop91Config { radius: 3, words: 40, seed: 12, emit_ball: true, ..Prop91Config::default() };
    let thm = TheoremBConfig { samples: 60, radius: 2, seed: 12, ..TheoremBConfig::default() };
    let ex = Example92Config::default();
    let runs = || {
        let (mut x, mut y, mut z) = (Vec::<Value>::new(), Vec::<Value>::new(), Vec::<Value>::new());
        let passed = run_prop91(&prop, &mut x).unwrap()
            && run_theorem_b(&thm, &mut y).unwrap()
            && run_example92(&ex, &mut z).unwrap();
        (passed, [json_lines(x), json_lines(y), json_lines(z)])
    };
    let ((passed, a), (_, b)) = (runs(), runs());
    let same = a == b;
    let bytes: usize = a.iter().map(String::len).sum();
    verdict(same && passed && bytes > 0, format!("3 experiments passed: {passed}, {bytes} bytes, identical: {same}"))
}

#[test]
fn acceptance() {
    let criteria: [fn() -> Verdict; 12] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
        criterion_12,
    ];
    let results: Vec<(Verdict, Duration)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|c| {
                s.spawn(move || {
                    let t = Instant::now();
                    (c(), t.elapsed())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut failed = Vec::new();
    for (i, (v, t)) in results.iter().enumerate() {
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2}: {status} ({:.1}s) {}", i + 1, t.as_secs_f64(), v.detail);
        if !v.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
