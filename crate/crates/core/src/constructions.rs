//! Families of reducible subgroups of the torus mapping class group: checks for
//! separation, misalignment and displacement, empirical versions of the constants
//! in the free-product criteria, and generators for the standard examples.

use crate::bassserre::{free_product_check, union_diameter, FactorSpec, FreeProductReport, IdentityMode, WordBudget};
use crate::error::{invalid, Error, Result};
use crate::farey::{
    annular_distance, annular_projection, conjugator, farey_distance, twist_about, MappingClass, Slope,
};
use crate::half::HalfInt;
use crate::hypgraph::FareyMetric;
use crate::projections::{Constants, Rational};
use crate::serde_big;
use crate::subgroups::Letter;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

/// Factors with reducing multicurves, plus optional displacing multicurves `β_i`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilySpec {
    pub factors: Vec<FactorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub displacing: Option<Vec<Vec<Slope>>>,
}

impl FamilySpec {
    pub fn new(factors: Vec<FactorSpec>) -> Self {
        FamilySpec { factors, displacing: None }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    fn boundary(&self, i: usize) -> &[Slope] {
        &self.factors[i].boundary
    }

    fn dist(&self, i: usize, j: usize) -> u64 {
        set_distance(self.boundary(i), self.boundary(j))
    }
}

/// Farey distance between multicurves, taken as the diameter of the union.
pub fn set_distance(a: &[Slope], b: &[Slope]) -> u64 {
    union_diameter(&FareyMetric, a, b).expect("Farey distances always exist")
}

/// `(a|b)_c` with multicurve distances.
pub fn set_gromov_product(a: &[Slope], b: &[Slope], c: &[Slope]) -> HalfInt {
    let (ca, cb, ab) = (set_distance(c, a), set_distance(c, b), set_distance(a, b));
    HalfInt::gromov(ca as i64, cb as i64, ab as i64)
}

/// Constants a certificate was computed against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stamp {
    #[serde(flatten)]
    pub constants: Constants,
    pub delta: HalfInt,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    pub matrix: Vec<Vec<u64>>,
    pub min: Option<u64>,
    pub required: u64,
    pub pass: bool,
}

pub fn check_separated(f: &FamilySpec, d: u64) -> SeparationReport {
    let n = f.len();
    let matrix: Vec<Vec<u64>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { 0 } else { f.dist(i, j) }).collect()).collect();
    let min =
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| matrix[i][j]).min();
    SeparationReport { pass: min.is_none_or(|m| m >= d), matrix, min, required: d }
}

#[derive(Clone, Debug, Serialize)]
pub struct TripleProduct {
    pub i: usize,
    pub j: usize,
    /// Base point index.
    pub k: usize,
    pub product: HalfInt,
}

#[derive(Clone, Debug, Serialize)]
pub struct MisalignmentReport {
    /// `(∂H_i | ∂H_j)_{∂H_k}` for `i < j` and `k` distinct from both.
    pub triples: Vec<TripleProduct>,
    pub min: Option<HalfInt>,
    pub required: HalfInt,
    pub pass: bool,
}

pub fn check_misaligned(f: &FamilySpec, a: HalfInt) -> MisalignmentReport {
    let n = f.len();
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in (0..n).filter(|&k| k != i && k != j) {
                let product = set_gromov_product(f.boundary(i), f.boundary(j), f.boundary(k));
                triples.push(TripleProduct { i, j, k, product });
            }
        }
    }
    let min = triples.iter().map(|t| t.product).min();
    MisalignmentReport { pass: min.is_none_or(|m| m >= a), triples, min, required: a }
}

/// `d_y(A, B)` for multicurves, ignoring components equal to `y`.
fn annular_set_distance(y: &Slope, a: &[Slope], b: &[Slope]) -> Option<u64> {
    let pa: Vec<BigInt> = a.iter().flat_map(|s| annular_projection(y, s)).collect();
    let pb: Vec<BigInt> = b.iter().flat_map(|s| annular_projection(y, s)).collect();
    if pa.is_empty() || pb.is_empty() {
        return None;
    }
    let lo = pa.iter().chain(&pb).min()?;
    let hi = pa.iter().chain(&pb).max()?;
    Some((hi - lo).to_u64().unwrap_or(u64::MAX))
}

/// Slopes `y` with `d(y, β) ≤ 1`: `β` itself and its Farey neighbours
/// `M⁻¹(n)` for `|n| ≤ shell`, where `M` sends the first slope of `β` to `1/0`.
pub fn shell_sites(beta: &[Slope], shell: i64) -> Vec<Slope> {
    let Some(first) = beta.first() else { return Vec::new() };
    let back = conjugator(first).inverse();
    let mut out = vec![first.clone()];
    out.extend((-shell..=shell).map(|n| back.act(&Slope::integer(n))));
    out.retain(|y| set_distance(std::slice::from_ref(y), beta) <= 1);
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct DisplacingEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// Spelling of `h ∈ H_j`.
    pub h: Vec<Letter>,
    /// Best site found in the shell, with its `d_Y(β_i, hβ_k)`.
    pub site: Option<Slope>,
    pub margin: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DisplacingReport {
    pub required: u64,
    /// `h β_j ≠ β_j` for some enumerated `h ∈ H_j`.
    pub unstable: Vec<usize>,
    /// Pairs with `d(β_i, β_j) < 5`.
    pub close_pairs: Vec<(usize, usize)>,
    pub entries: Vec<DisplacingEntry>,
    pub min_margin: Option<u64>,
    /// Entries with no site reaching the required margin within the shell.
    pub not_found: usize,
    pub pass: bool,
}

/// Searches each `(i, j, k, h)` with `i ≠ j ≠ k` (so `i = k` is allowed) and
/// nontrivial enumerated `h ∈ H_j` for a site in the shell about `β_j`.
pub fn check_displacing(f: &FamilySpec, l: u64, shell: i64) -> Result<DisplacingReport> {
    let beta = f.displacing.as_ref().ok_or_else(|| invalid("family has no displacing multicurves"))?;
    let n = f.len();
    if beta.len() != n || beta.iter().any(Vec::is_empty) {
        return Err(invalid("need one nonempty multicurve per factor"));
    }
    let tables: Vec<_> = f.factors.iter().map(FactorSpec::table).collect();
    let sorted = |v: Vec<Slope>| {
        let mut v = v;
        v.sort();
        v.dedup();
        v
    };
    let unstable: Vec<usize> = (0..n)
        .filter(|&j| {
            let target = sorted(beta[j].clone());
            tables[j].elements.iter().any(|h| sorted(beta[j].iter().map(|s| h.matrix.act(s)).collect()) != target)
        })
        .collect();
    let close_pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| set_distance(&beta[i], &beta[j]) < 5)
        .collect();
    let mut entries = Vec::new();
    for j in 0..n {
        let sites = shell_sites(&beta[j], shell);
        for i in (0..n).filter(|&i| i != j) {
            for k in (0..n).filter(|&k| k != j) {
                for h in &tables[j].elements[1..] {
                    let moved: Vec<Slope> = beta[k].iter().map(|s| h.matrix.act(s)).collect();
                    let best = sites
                        .iter()
                        .filter_map(|y| annular_set_distance(y, &beta[i], &moved).map(|d| (d, y)))
                        .max_by_key(|(d, _)| *d);
                    entries.push(DisplacingEntry {
                        i,
                        j,
                        k,
                        h: h.word.clone(),
                        margin: best.map(|b| b.0),
                        site: best.map(|b| b.1.clone()),
                    });
                }
            }
        }
    }
    let min_margin = entries.iter().map(|e| e.margin.unwrap_or(0)).min();
    let not_found = entries.iter().filter(|e| e.margin.is_none_or(|m| m < l)).count();
    Ok(DisplacingReport {
        required: l,
        pass: unstable.is_empty() && close_pairs.is_empty() && not_found == 0,
        unstable,
        close_pairs,
        entries,
        min_margin,
        not_found,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CertBundle {
    pub stamp: Stamp,
    pub separation: SeparationReport,
    pub misalignment: MisalignmentReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub displacing: Option<DisplacingReport>,
}

pub fn certify(f: &FamilySpec, stamp: Stamp, d: u64, a: HalfInt, displacing: Option<(u64, i64)>) -> Result<CertBundle> {
    Ok(CertBundle {
        stamp,
        separation: check_separated(f, d),
        misalignment: check_misaligned(f, a),
        displacing: displacing.map(|(l, shell)| check_displacing(f, l, shell)).transpose()?,
    })
}

/// Infinite-order elements of a torus factor: not `±I` and `|trace| ≥ 2`.
fn infinite_order(m: &MappingClass) -> bool {
    !m.is_central() && m.trace().abs() >= BigInt::from(2)
}

#[derive(Clone, Debug, Serialize)]
pub struct DefiniteDistanceReport {
    /// Least `K ≥ 1` with `d(α, gα) ≥ (d(α, ∂H) − 3)/K` on the sample; `None` when
    /// some element fixes a curve at distance more than 3 from `∂H`.
    #[serde(with = "serde_big::ratio_opt")]
    pub k_emp: Option<Rational>,
    /// `K = mN/2` with `N = 1` and `m` least with `m·c − 2 > M`.
    #[serde(with = "serde_big::ratio")]
    pub k_closed_form: Rational,
    pub pairs: u64,
    /// Curve and element spelling attaining `k_emp`.
    pub witness: Option<(Slope, Vec<Letter>)>,
}

pub fn definite_distance_scan(h: &FactorSpec, samples: &[Slope], constants: Constants) -> DefiniteDistanceReport {
    let elements: Vec<_> = h.table().elements.into_iter().filter(|e| infinite_order(&e.matrix)).collect();
    let one = Rational::from_integer(1);
    let mut k_emp = Some(one);
    let mut witness = None;
    let mut pairs = 0;
    for a in samples {
        let to_boundary = set_distance(std::slice::from_ref(a), &h.boundary) as i64;
        for g in &elements {
            pairs += 1;
            if to_boundary <= 3 {
                continue;
            }
            let moved = farey_distance(a, &g.matrix.act(a)) as i64;
            let need = if moved == 0 { None } else { Some(Rational::new(to_boundary - 3, moved)) };
            let worse = match (need, k_emp) {
                (None, Some(_)) => true,
                (Some(x), Some(cur)) => x > cur,
                _ => false,
            };
            if worse {
                k_emp = need;
                witness = Some((a.clone(), g.word.clone()));
            }
        }
    }
    // Least m with m·c > M + 2.
    let m_steps = (Rational::from_integer(constants.m as i64 + 2) / constants.c).floor().to_integer() + 1;
    DefiniteDistanceReport { k_emp, k_closed_form: Rational::new(m_steps, 2), pairs, witness }
}

#[derive(Clone, Debug, Serialize)]
pub struct GromovBoundReport {
    /// Largest `(α | gα)_{∂H}` on the sample.
    pub k_prime_emp: HalfInt,
    /// `4δ + (12δ + 3)K + 5`.
    #[serde(with = "serde_big::ratio")]
    pub closed_form: Rational,
    pub holds: bool,
    pub pairs: u64,
    pub witness: Option<(Slope, Vec<Letter>)>,
}

pub fn gromov_bound_scan(h: &FactorSpec, samples: &[Slope], delta: HalfInt, k: Rational) -> GromovBoundReport {
    let elements: Vec<_> = h.table().elements.into_iter().filter(|e| infinite_order(&e.matrix)).collect();
    let mut best = HalfInt::ZERO;
    let mut witness = None;
    let mut pairs = 0;
    for a in samples {
        for g in &elements {
            pairs += 1;
            let p = set_gromov_product(std::slice::from_ref(a), &[g.matrix.act(a)], &h.boundary);
            if p > best || witness.is_none() {
                best = best.max(p);
                witness = Some((a.clone(), g.word.clone()));
            }
        }
    }
    let d = Rational::new(delta.halves(), 2);
    let closed_form = d * 4 + (d * 12 + 3) * k + 5;
    GromovBoundReport {
        k_prime_emp: best,
        holds: Rational::new(best.halves(), 2) <= closed_form,
        closed_form,
        pairs,
        witness,
    }
}

/// Misalignment `A = K' + 5 + δ` and separation `D = 4K' + 11 + 28δ`.
pub fn theorem_b_constants(k_prime: Rational, delta: Rational) -> Result<(Rational, Rational)> {
    if k_prime < Rational::from_integer(0) || delta < Rational::from_integer(0) {
        return Err(invalid("constants must be nonnegative"));
    }
    Ok((k_prime + 5 + delta, k_prime * 4 + 11 + delta * 28))
}

/// Value of the continued fraction `[a_0; a_1, …]`.
fn continued_fraction_value(terms: &[i64]) -> Slope {
    let (mut p, mut q) = (BigInt::from(1), BigInt::from(0));
    let (mut pp, mut qq) = (BigInt::from(0), BigInt::from(1));
    for &a in terms {
        let (np, nq) = (&p * a + &pp, &q * a + &qq);
        (pp, qq) = (p, q);
        (p, q) = (np, nq);
    }
    Slope::new(p, q).expect("convergents are nonzero")
}

/// A slope at Farey distance exactly `d` from `alpha`: the image of
/// `[0; 2, 2, …, 2]` under the map sending `1/0` to `alpha`, lengthened until the
/// distance is hit.
pub fn slope_at_distance(alpha: &Slope, d: u64) -> Result<Slope> {
    if d == 0 {
        return Ok(alpha.clone());
    }
    let back = conjugator(alpha).inverse();
    let mut terms = vec![0i64];
    for _ in 0..=4 * d + 4 {
        let s = continued_fraction_value(&terms);
        match farey_distance(&Slope::infinity(), &s) {
            x if x == d => return Ok(back.act(&s)),
            x if x > d => break,
            _ => terms.push(2),
        }
    }
    Err(Error::BudgetExhausted(format!("no slope found at distance {d} from {alpha}")))
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop91Family {
    pub dprime: u64,
    pub alpha: Slope,
    /// Core of the twisting annulus, at distance `dprime` from `alpha`.
    pub y: Slope,
    /// Least power with `d_y(α, T_y^N α) > M`.
    pub n: i64,
    pub indices: Vec<i64>,
    /// `α_{kN} = T_y^{kN} α` per index `k`.
    pub curves: Vec<Slope>,
    pub family: FamilySpec,
}

/// Factors `⟨T_{α_{kN}}⟩` for `k` in `window`, each enumerated to `|power| ≤ max_power`.
pub fn prop91_generate(
    dprime: u64,
    alpha: &Slope,
    window: std::ops::RangeInclusive<i64>,
    m: u64,
    max_power: usize,
) -> Result<Prop91Family> {
    if dprime <= 8 {
        return Err(invalid(format!("need D' > 8, got {dprime}")));
    }
    let y = slope_at_distance(alpha, dprime)?;
    let mut n = 1i64;
    while annular_distance(&y, alpha, &twist_about(&y, n).act(alpha))? <= m {
        n += 1;
    }
    let indices: Vec<i64> = window.collect();
    let curves: Vec<Slope> = indices.iter().map(|&k| twist_about(&y, k * n).act(alpha)).collect();
    let factors = curves.iter().map(|c| FactorSpec::cyclic(twist_about(c, 1), vec![c.clone()], max_power)).collect();
    let family = FamilySpec { factors, displacing: Some(curves.iter().map(|c| vec![c.clone()]).collect()) };
    Ok(Prop91Family { dprime, alpha: alpha.clone(), y, n, indices, curves, family })
}

#[derive(Clone, Debug, Serialize)]
pub struct Example92 {
    pub alpha: Slope,
    pub beta: Slope,
    /// `T = T_α^power`, least with `d_α(β, Tβ) ≥ M`.
    pub power: i64,
    /// `H_α`, `H_β`, `T H_β T⁻¹`.
    pub family: FamilySpec,
    pub separation: SeparationReport,
    pub misalignment: MisalignmentReport,
    pub free_product: FreeProductReport,
}

pub fn example92_generate(d: u64, alpha: &Slope, beta: &Slope, m: u64, max_syllables: usize) -> Result<Example92> {
    if farey_distance(alpha, beta) < d {
        return Err(invalid(format!("d({alpha}, {beta}) < {d}")));
    }
    let mut power = 1i64;
    while annular_distance(alpha, beta, &twist_about(alpha, power).act(beta))? < m {
        power += 1;
    }
    let t = twist_about(alpha, power);
    let tb = t.act(beta);
    let letters = power as usize;
    let factors = vec![
        FactorSpec::cyclic(twist_about(alpha, 1), vec![alpha.clone()], letters),
        FactorSpec::cyclic(twist_about(beta, 1), vec![beta.clone()], letters),
        FactorSpec::cyclic(twist_about(beta, 1).conjugate_by(&t.inverse()), vec![tb], letters),
    ];
    let family = FamilySpec::new(factors);
    let budget = WordBudget { syllables: max_syllables, syllable_letters: letters };
    Ok(Example92 {
        alpha: alpha.clone(),
        beta: beta.clone(),
        power,
        separation: check_separated(&family, d),
        misalignment: check_misaligned(&family, HalfInt::from_int(2)),
        free_product: free_product_check(&family.factors, budget, IdentityMode::Projective),
        family,
    })
}
