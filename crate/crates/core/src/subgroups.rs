//! Finitely generated subgroups of SL(2, ℤ) acting on slopes: Nielsen-Thurston
//! types, orbits, canonical reducing systems and multitwist recognition.

use crate::error::{invalid, Result};
use crate::farey::{MappingClass, Slope};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashSet, VecDeque};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NtType {
    /// `±I`, trivial on slopes.
    Central,
    /// Finite order but not central.
    Periodic,
    /// Parabolic: a power of a twist, fixing exactly one slope.
    Reducible { fixed: Slope },
    /// Hyperbolic: an Anosov map, no fixed slope.
    PseudoAnosov,
}

pub fn nielsen_thurston_type(m: &MappingClass) -> NtType {
    if m.is_central() {
        return NtType::Central;
    }
    let t = m.trace().abs();
    let two = BigInt::from(2);
    if t < two {
        NtType::Periodic
    } else if t == two {
        NtType::Reducible { fixed: parabolic_fixed_slope(m).expect("parabolics fix a slope") }
    } else {
        NtType::PseudoAnosov
    }
}

/// The fixed slope of a non-central matrix with trace `±2`.
pub fn parabolic_fixed_slope(m: &MappingClass) -> Option<Slope> {
    if m.is_central() || m.trace().abs() != BigInt::from(2) {
        return None;
    }
    let [a, b, c, d] = m.entries();
    let s: BigInt = m.trace() / 2;
    // Kernel of m − sI: (b, s − a) or (s − d, c), whichever is nonzero.
    if !(b.is_zero() && (&s - a).is_zero()) {
        Slope::new(b.clone(), &s - a).ok()
    } else {
        Slope::new(&s - d, c.clone()).ok()
    }
}

/// A letter `(generator index, ±1)`.
pub type Letter = (usize, i8);

#[derive(Clone, Debug, Serialize)]
pub struct GroupElement {
    pub word: Vec<Letter>,
    pub matrix: MappingClass,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixGroup {
    pub generators: Vec<MappingClass>,
    /// Cap on enumerated elements and orbit sizes.
    pub budget: usize,
}

impl MatrixGroup {
    pub fn new(generators: Vec<MappingClass>, budget: usize) -> Self {
        MatrixGroup { generators, budget }
    }

    fn letter_matrix(&self, (g, e): Letter) -> MappingClass {
        if e > 0 {
            self.generators[g].clone()
        } else {
            self.generators[g].inverse()
        }
    }

    pub fn evaluate(&self, word: &[Letter]) -> Result<MappingClass> {
        let mut m = MappingClass::identity();
        for &(g, e) in word {
            if g >= self.generators.len() || e.abs() != 1 {
                return Err(invalid(format!("bad letter ({g}, {e})")));
            }
            m = &m * &self.letter_matrix((g, e));
        }
        Ok(m)
    }

    /// Distinct elements up to `±I`, in shortlex order of their first spelling
    /// (letters ordered `g0, g0⁻¹, g1, g1⁻¹, …`), at most `budget` of them.
    pub fn enumerate(&self) -> Vec<GroupElement> {
        let letters: Vec<Letter> = (0..self.generators.len()).flat_map(|g| [(g, 1), (g, -1)]).collect();
        let id = GroupElement { word: Vec::new(), matrix: MappingClass::identity() };
        let mut seen = HashSet::from([id.matrix.projective_key()]);
        let mut out = vec![id];
        let mut frontier = 0;
        while frontier < out.len() && out.len() < self.budget {
            let base = out[frontier].clone();
            frontier += 1;
            for &l in &letters {
                if base.word.last() == Some(&(l.0, -l.1)) {
                    continue;
                }
                let m = &base.matrix * &self.letter_matrix(l);
                if seen.insert(m.projective_key()) {
                    let mut word = base.word.clone();
                    word.push(l);
                    out.push(GroupElement { word, matrix: m });
                    if out.len() >= self.budget {
                        break;
                    }
                }
            }
        }
        out
    }
}

/// Why an orbit is known to be infinite: an infinite-order element moves the slope.
#[derive(Clone, Debug, Serialize)]
pub struct InfiniteOrbitCertificate {
    pub word: Vec<Letter>,
    pub kind: NtType,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum OrbitResult {
    Finite { orbit: Vec<Slope> },
    Overflow { explored: usize, certificate: Option<InfiniteOrbitCertificate> },
}

impl OrbitResult {
    pub fn is_finite(&self) -> bool {
        matches!(self, OrbitResult::Finite { .. })
    }

    pub fn certified_infinite(&self) -> bool {
        matches!(self, OrbitResult::Overflow { certificate: Some(_), .. })
    }
}

/// A parabolic element moving `s` has an orbit on which annular distance about its
/// fixed slope grows without bound; a hyperbolic element fixes no slope at all.
fn infinite_orbit_certificate(group: &MatrixGroup, s: &Slope) -> Option<InfiniteOrbitCertificate> {
    for e in group.enumerate().into_iter().take(64) {
        let kind = nielsen_thurston_type(&e.matrix);
        let infinite_order = matches!(kind, NtType::Reducible { .. } | NtType::PseudoAnosov);
        if infinite_order && e.matrix.act(s) != *s {
            return Some(InfiniteOrbitCertificate { word: e.word, kind });
        }
    }
    None
}

/// Breadth-first orbit of `s`, stopping once it exceeds `budget` slopes.
pub fn orbit(group: &MatrixGroup, s: &Slope, budget: usize) -> OrbitResult {
    let moves: Vec<MappingClass> = group.generators.iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
    let mut seen = BTreeSet::from([s.clone()]);
    let mut queue = VecDeque::from([s.clone()]);
    while let Some(x) = queue.pop_front() {
        for m in &moves {
            let y = m.act(&x);
            if seen.insert(y.clone()) {
                if seen.len() > budget {
                    return OrbitResult::Overflow {
                        explored: seen.len(),
                        certificate: infinite_orbit_certificate(group, s),
                    };
                }
                queue.push_back(y);
            }
        }
    }
    OrbitResult::Finite { orbit: seen.into_iter().collect() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Exact,
    BudgetLimited,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducingSystem {
    /// Curves of the reducing system disjoint from all others; on the torus this
    /// is the reducing system itself when it is a single slope, else empty.
    pub boundary: Vec<Slope>,
    /// Candidates found to have finite orbit, with their orbits merged.
    pub finite_orbit_slopes: Vec<Slope>,
    pub confidence: Confidence,
}

/// Canonical reducing system, searched among `candidates` (default: fixed slopes
/// of parabolic generators and the slopes `1/0, 0/1, 1/1, -1/1`).
pub fn canonical_reducing_system(group: &MatrixGroup, candidates: Option<&[Slope]>, budget: usize) -> ReducingSystem {
    let mut cands: Vec<Slope> = match candidates {
        Some(c) => c.to_vec(),
        None => {
            let mut c: Vec<Slope> = group.generators.iter().filter_map(parabolic_fixed_slope).collect();
            for (p, q) in [(1, 0), (0, 1), (1, 1), (-1, 1)] {
                c.push(Slope::new(p, q).unwrap());
            }
            c
        }
    };
    cands.sort();
    cands.dedup();
    let mut finite = BTreeSet::new();
    let mut exact = true;
    for c in &cands {
        match orbit(group, c, budget) {
            OrbitResult::Finite { orbit } => finite.extend(orbit),
            OrbitResult::Overflow { certificate, .. } => exact &= certificate.is_some(),
        }
    }
    let finite: Vec<Slope> = finite.into_iter().collect();
    // Two distinct slopes always intersect, so only a lone finite orbit survives.
    let boundary = if finite.len() == 1 { finite.clone() } else { Vec::new() };
    // More than one finite-orbit slope settles the answer regardless of the rest.
    let confidence = if exact || finite.len() > 1 { Confidence::Exact } else { Confidence::BudgetLimited };
    ReducingSystem { boundary, finite_orbit_slopes: finite, confidence }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultitwistWitness {
    /// A generator of finite order that is not central.
    Torsion { generator: usize },
    /// A generator of infinite order fixing no slope.
    Hyperbolic { generator: usize },
    /// Two parabolic generators with different fixed slopes, and a short word in
    /// them with `|trace| > 2`.
    MixedWord { word: Vec<Letter>, trace: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct MultitwistReport {
    pub is_multitwist: bool,
    pub common_slope: Option<Slope>,
    pub witness: Option<MultitwistWitness>,
}

/// Whether every generator is parabolic or central and all parabolic generators
/// share one fixed slope.
pub fn is_multitwist(group: &MatrixGroup) -> MultitwistReport {
    let mut common: Option<(usize, Slope)> = None;
    for (i, g) in group.generators.iter().enumerate() {
        let fail = |w| MultitwistReport { is_multitwist: false, common_slope: None, witness: Some(w) };
        match nielsen_thurston_type(g) {
            NtType::Central => {}
            NtType::Periodic => return fail(MultitwistWitness::Torsion { generator: i }),
            NtType::PseudoAnosov => return fail(MultitwistWitness::Hyperbolic { generator: i }),
            NtType::Reducible { fixed } => match &common {
                None => common = Some((i, fixed)),
                Some((_, f)) if *f == fixed => {}
                Some((j, _)) => {
                    let j = *j;
                    // tr(AB) + tr(AB⁻¹) = tr A · tr B = ±4, so one of these is hyperbolic.
                    for e in [1, -1] {
                        let word = vec![(j, 1), (i, e)];
                        let t = group.evaluate(&word).expect("valid letters").trace();
                        if t.abs() > BigInt::from(2) {
                            return fail(MultitwistWitness::MixedWord { word, trace: t.to_string() });
                        }
                    }
                    unreachable!("parabolics with distinct fixed slopes generate a hyperbolic");
                }
            },
        }
    }
    MultitwistReport { is_multitwist: true, common_slope: common.map(|c| c.1), witness: None }
}

/// Trace magnitude above 2.
pub fn is_hyperbolic(m: &MappingClass) -> bool {
    m.trace().abs() > BigInt::from(2)
}

/// `true` for `±I`.
pub fn is_projective_identity(m: &MappingClass) -> bool {
    m.is_central()
}
