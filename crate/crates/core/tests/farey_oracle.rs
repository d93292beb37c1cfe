//! The continued-fraction distance against breadth-first search on bounded
//! subgraphs of the Farey graph, plus the action invariants.

use num_bigint::BigInt;
use proptest::prelude::*;
use rgf_core::farey::oracle::BoundedFarey;
use rgf_core::farey::{
    adjacent, annular_distance, annular_projection, conjugator, farey_distance, farey_geodesic, twist_about,
};
use rgf_core::{MappingClass, Slope};

/// BFS distances at bound 2Q and 4Q agree for every pair inside bound Q, and the
/// ladder distance matches them.
#[test]
fn ladder_matches_stabilized_bfs_small() {
    let q = 8;
    let inner = BoundedFarey::new(q);
    let mid = BoundedFarey::new(2 * q);
    let outer = BoundedFarey::new(4 * q);
    let slopes: Vec<Slope> = inner.slopes().collect();
    for a in &slopes {
        let dm = mid.distances_from(a).unwrap();
        let dout = outer.distances_from(a).unwrap();
        for b in &slopes {
            let m = dm[mid.index_of(b).unwrap()].unwrap();
            let o = dout[outer.index_of(b).unwrap()].unwrap();
            assert_eq!(m, o, "BFS not stabilized for {a} {b}");
            assert_eq!(farey_distance(a, b), m, "{a} -> {b}");
        }
    }
}

fn slope_strategy() -> impl Strategy<Value = Slope> {
    (-400i64..=400, 0i64..=400)
        .prop_filter("not 0/0", |(p, q)| *p != 0 || *q != 0)
        .prop_map(|(p, q)| Slope::new(p, q).unwrap())
}

fn matrix_strategy() -> impl Strategy<Value = MappingClass> {
    // Words in the standard generators give every element of SL(2, Z).
    prop::collection::vec((0u8..2, -3i64..=3), 0..6).prop_map(|w| {
        let mut m = MappingClass::identity();
        for (g, e) in w {
            let step = if g == 0 { MappingClass::twist_at_infinity(e) } else { MappingClass::new(1, 0, e, 1).unwrap() };
            m = &m * &step;
        }
        m
    })
}

proptest! {
    #[test]
    fn distance_is_symmetric(a in slope_strategy(), b in slope_strategy()) {
        prop_assert_eq!(farey_distance(&a, &b), farey_distance(&b, &a));
    }

    #[test]
    fn triangle_inequality(a in slope_strategy(), b in slope_strategy(), c in slope_strategy()) {
        prop_assert!(farey_distance(&a, &c) <= farey_distance(&a, &b) + farey_distance(&b, &c));
    }

    #[test]
    fn geodesics_are_paths(a in slope_strategy(), b in slope_strategy()) {
        let g = farey_geodesic(&a, &b);
        prop_assert_eq!(g.len() as u64, farey_distance(&a, &b) + 1);
        prop_assert!(g.windows(2).all(|w| adjacent(&w[0], &w[1])));
        prop_assert_eq!(&g[0], &a);
        prop_assert_eq!(g.last().unwrap(), &b);
    }

    #[test]
    fn action_is_an_isometry(m in matrix_strategy(), a in slope_strategy(), b in slope_strategy()) {
        prop_assert_eq!(farey_distance(&m.act(&a), &m.act(&b)), farey_distance(&a, &b));
    }

    #[test]
    fn annular_distance_is_equivariant(
        m in matrix_strategy(),
        a in slope_strategy(),
        b in slope_strategy(),
        c in slope_strategy(),
    ) {
        prop_assume!(a != b && a != c);
        prop_assert_eq!(
            annular_distance(&m.act(&a), &m.act(&b), &m.act(&c)).unwrap(),
            annular_distance(&a, &b, &c).unwrap()
        );
    }

    /// Any other element sending alpha to 1/0 differs by a translation (up to sign),
    /// which shifts both projections equally.
    #[test]
    fn annular_distance_ignores_the_conjugator(
        a in slope_strategy(),
        b in slope_strategy(),
        c in slope_strategy(),
        t in -50i64..50,
        neg in any::<bool>(),
    ) {
        prop_assume!(a != b && a != c);
        let mut other = &MappingClass::twist_at_infinity(t) * &conjugator(&a);
        if neg {
            other = other.negate();
        }
        let proj = |x: &Slope| {
            let y = other.act(x);
            let f = y.floor().unwrap();
            let c = y.ceil().unwrap();
            (f, c)
        };
        let (fb, cb) = proj(&b);
        let (fc, cc) = proj(&c);
        let lo = fb.clone().min(fc.clone());
        let hi = cb.max(cc);
        let expected: BigInt = hi - lo;
        prop_assert_eq!(BigInt::from(annular_distance(&a, &b, &c).unwrap()), expected);
    }

    #[test]
    fn twist_translation_is_at_least_n(a in slope_strategy(), b in slope_strategy(), n in -100i64..=100) {
        prop_assume!(a != b);
        let t = twist_about(&a, n);
        prop_assert!(annular_distance(&a, &t.act(&b), &b).unwrap() >= n.unsigned_abs());
        prop_assert!(!annular_projection(&a, &b).is_empty());
    }
}
