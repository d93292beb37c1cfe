//! Certificates on generated families, and the empirical constants behind them.

use proptest::prelude::*;
use rgf_core::bassserre::FactorSpec;
use rgf_core::constructions::*;
use rgf_core::farey::{random_slope, twist_about};
use rgf_core::projections::TorusAnnuli;
use rgf_core::rng::seeded;
use rgf_core::{HalfInt, MappingClass, Slope};

fn samples(seed: u64, count: usize) -> Vec<Slope> {
    let mut r = seeded(seed);
    (0..count).map(|_| random_slope(&mut r, 5_000)).collect()
}

fn twist_factor(c: &Slope, power: i64, max_power: usize) -> FactorSpec {
    FactorSpec::cyclic(twist_about(c, power), vec![c.clone()], max_power)
}

#[test]
fn large_twist_powers_displace() {
    let l = 6;
    let fam = prop91_generate(12, &Slope::infinity(), -1..=1, 4, 2).unwrap();
    let curves = &fam.curves;
    let factors = curves.iter().map(|c| twist_factor(c, l as i64 + 1, 2)).collect();
    let spec = FamilySpec { factors, displacing: Some(curves.iter().map(|c| vec![c.clone()]).collect()) };
    let rep = check_displacing(&spec, l, 4).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert!(rep.min_margin.unwrap() > l);
    // Three factors, two choices of i and k each, four nontrivial powers.
    assert_eq!(rep.entries.len(), 3 * 2 * 2 * 4);
}

#[test]
fn displacing_needs_invariant_multicurves() {
    let fam = prop91_generate(12, &Slope::infinity(), -1..=1, 4, 1).unwrap();
    let mut spec = fam.family.clone();
    spec.displacing = Some(vec![vec![Slope::integer(0)], vec![fam.curves[1].clone()], vec![fam.curves[2].clone()]]);
    let rep = check_displacing(&spec, 1, 4).unwrap();
    assert!(rep.unstable.contains(&0));
    assert!(!rep.pass);
    spec.displacing = None;
    assert!(check_displacing(&spec, 1, 4).is_err());
}

#[test]
fn definite_distance_constant_is_stable() {
    let h = twist_factor(&Slope::infinity(), 1, 4);
    let c = TorusAnnuli::DEFAULT_CONSTANTS;
    let one = definite_distance_scan(&h, &samples(1, 500), c);
    let two = definite_distance_scan(&h, &samples(2, 500), c);
    assert_eq!(one.k_emp, two.k_emp);
    assert!(one.k_emp.unwrap() <= one.k_closed_form);
}

#[test]
fn gromov_bound_holds_and_grows_with_the_sample() {
    let h = twist_factor(&Slope::infinity(), 2, 4);
    let k = definite_distance_scan(
        &twist_factor(&Slope::infinity(), 1, 4),
        &samples(3, 200),
        TorusAnnuli::DEFAULT_CONSTANTS,
    )
    .k_closed_form;
    let all = samples(4, 1_000);
    let mut last = HalfInt::ZERO;
    for n in [10, 100, 500, 1_000] {
        let rep = gromov_bound_scan(&h, &all[..n], HalfInt::from_int(1), k);
        assert!(rep.holds, "{rep:?}");
        assert!(rep.k_prime_emp >= last);
        last = rep.k_prime_emp;
    }
}

#[test]
fn generated_families_certify_themselves() {
    for dprime in 10..=16 {
        let fam = prop91_generate(dprime, &Slope::infinity(), -2..=2, 4, 1).unwrap();
        let sep = check_separated(&fam.family, 2 * dprime - 6);
        let mis = check_misaligned(&fam.family, HalfInt::from_int(dprime as i64 - 8));
        assert!(sep.pass && mis.pass, "D' = {dprime}: {:?} {:?}", sep.min, mis.min);
    }
}

#[test]
fn family_spec_roundtrips_through_json() {
    let fam = prop91_generate(10, &"2/7".parse().unwrap(), -1..=1, 4, 2).unwrap().family;
    let json = serde_json::to_string(&fam).unwrap();
    let back: FamilySpec = serde_json::from_str(&json).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), json);
    assert_eq!(check_separated(&back, 1).matrix, check_separated(&fam, 1).matrix);
}

#[test]
fn theorem_b_constants_follow_the_closed_form() {
    let (a, d) = theorem_b_constants(3.into(), 1.into()).unwrap();
    assert_eq!((a, d), (9.into(), 51.into()));
    assert!(theorem_b_constants((-1).into(), 1.into()).is_err());
}

fn slope() -> impl Strategy<Value = Slope> {
    (-60i64..=60, 1i64..=60).prop_filter_map("coprime", |(p, q)| Slope::new(p, q).ok())
}

fn multicurve() -> impl Strategy<Value = Vec<Slope>> {
    prop::collection::vec(slope(), 1..=2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Misalignment at level `A` forces separation at least `2A − 4 − 16δ`.
    #[test]
    fn misalignment_implies_separation(a in multicurve(), b in multicurve(), c in multicurve()) {
        let factors = [a, b, c]
            .into_iter()
            .map(|m| FactorSpec::cyclic(MappingClass::identity(), m, 0))
            .collect();
        let fam = FamilySpec::new(factors);
        let mis = check_misaligned(&fam, HalfInt::ZERO);
        let level = mis.min.unwrap();
        let sep = check_separated(&fam, 0);
        let floor = level * 2 - HalfInt::from_int(4 + 16);
        prop_assert!(HalfInt::from_int(sep.min.unwrap() as i64) >= floor);
    }

    #[test]
    fn slope_at_distance_is_exact(p in -30i64..=30, q in 1i64..=30, d in 0u64..=25) {
        prop_assume!(num_integer::gcd(p, q) == 1);
        let alpha = Slope::new(p, q).unwrap();
        let s = slope_at_distance(&alpha, d).unwrap();
        prop_assert_eq!(rgf_core::farey::farey_distance(&alpha, &s), d);
    }
}
