//! End-to-end runs over generated families. Each run hands its records to a
//! [`Sink`] in a fixed order, so the same configuration always yields the same bytes.

use crate::bassserre::{
    build_ball, free_product_check, loxodromic_scan, phi, qi_scan, random_cyclic_words, FactorSpec, IdentityMode,
    QiPair, WordBudget,
};
use crate::constructions::{
    certify, check_misaligned, check_separated, definite_distance_scan, example92_generate, gromov_bound_scan,
    prop91_generate, slope_at_distance, theorem_b_constants, Stamp,
};
use crate::error::Result;
use crate::farey::{random_slope, twist_about, MappingClass, Slope};
use crate::half::HalfInt;
use crate::hypgraph::{estimate_delta, FareyMetric};
use crate::projections::{Constants, Rational, TorusAnnuli};
use crate::report::vertex_records;
use crate::rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Receives records as they are produced.
pub trait Sink {
    fn record(&mut self, kind: &str, data: Value);

    fn pair(&mut self, p: &QiPair) {
        self.record("pair", to_value(p));
    }
}

/// Collects `{"record": kind, "data": …}` objects.
impl Sink for Vec<Value> {
    fn record(&mut self, kind: &str, data: Value) {
        self.push(json!({ "record": kind, "data": data }));
    }
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("records serialize to JSON")
}

/// Final record: overall verdict plus the names of the checks that failed.
fn verdict(sink: &mut dyn Sink, checks: &[(&str, bool)]) -> bool {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let pass = failed.is_empty();
    sink.record("verdict", json!({ "pass": pass, "failed": failed }));
    pass
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct Prop91Config {
    pub dprime: u64,
    pub alpha: Slope,
    /// Factors `k ∈ −window..=window`.
    pub window: i64,
    /// Factors `k ∈ −tree_window..=tree_window` for the tree, relation and trace checks.
    pub tree_window: i64,
    pub radius: u64,
    pub max_power: usize,
    pub syllables: usize,
    pub words: usize,
    pub constants: Constants,
    pub delta: HalfInt,
    pub emit_ball: bool,
    pub seed: u64,
}

impl Default for Prop91Config {
    fn default() -> Self {
        Prop91Config {
            dprime: 20,
            alpha: Slope::infinity(),
            window: 2,
            tree_window: 1,
            radius: 6,
            max_power: 2,
            syllables: 8,
            words: 100,
            constants: TorusAnnuli::DEFAULT_CONSTANTS,
            delta: HalfInt::from_int(1),
            emit_ball: false,
            seed: 0,
        }
    }
}

/// Generate the family, certify separation and misalignment at `D = D' − 8`, then
/// run the free-product search, the tree-ball scan and the trace scan.
pub fn run_prop91(cfg: &Prop91Config, sink: &mut dyn Sink) -> Result<bool> {
    sink.record("config", to_value(cfg));
    let stamp = Stamp { constants: cfg.constants, delta: cfg.delta };
    let fam = prop91_generate(cfg.dprime, &cfg.alpha, -cfg.window..=cfg.window, cfg.constants.m, cfg.max_power)?;
    sink.record("family", json!({ "y": fam.y, "n": fam.n, "indices": fam.indices, "curves": fam.curves }));
    let d = cfg.dprime - 8;
    let certs = certify(&fam.family, stamp, d, HalfInt::from_int(d as i64), None)?;
    sink.record("certificates", to_value(&certs));
    let (lo, hi) = (2 * cfg.dprime - 6, 2 * cfg.dprime + 4);
    let in_window = certs
        .separation
        .matrix
        .iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, &x)| i == j || (lo..=hi).contains(&x)));
    sink.record("separation_window", json!({ "low": lo, "high": hi, "pass": in_window }));

    let sub =
        prop91_generate(cfg.dprime, &cfg.alpha, -cfg.tree_window..=cfg.tree_window, cfg.constants.m, cfg.max_power)?;
    let factors = &sub.family.factors;
    let fp = free_product_check(
        factors,
        WordBudget { syllables: cfg.syllables, syllable_letters: 1 },
        IdentityMode::Projective,
    );
    sink.record("free_product", to_value(&fp));
    let ball = build_ball(factors, cfg.radius)?;
    let labeled = phi(&ball, factors, &cfg.alpha)?;
    if cfg.emit_ball {
        for v in vertex_records(&labeled) {
            sink.record("vertex", to_value(v));
        }
    }
    let qi = qi_scan(&labeled, &FareyMetric, None, |p| sink.pair(p))?;
    sink.record("qi_summary", json!({ "summary": qi, "truncated_cosets": ball.truncated.len() }));
    let words = random_cyclic_words(&ball.factor_sizes, cfg.words, 6, cfg.seed)?;
    let lox = loxodromic_scan(factors, &words)?;
    sink.record("loxodromic", to_value(&lox));

    Ok(verdict(
        sink,
        &[
            ("separated", certs.separation.pass),
            ("separation_window", in_window),
            ("misaligned", certs.misalignment.pass),
            ("free_product", fp.no_relation),
            ("half_minus_four", qi.half_minus_four),
            ("pseudo_anosov", lox.failures.is_empty() && lox.pseudo_anosov == words.len()),
        ],
    ))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct TheoremBConfig {
    /// Random slopes for the hyperbolicity estimate and the scans.
    pub samples: usize,
    pub max_height: i64,
    pub radius: u64,
    pub seed: u64,
}

impl Default for TheoremBConfig {
    fn default() -> Self {
        TheoremBConfig { samples: 200, max_height: 1000, radius: 4, seed: 0 }
    }
}

/// Estimate `δ`, `K` and `K'` on the torus, turn them into `(A, D)`, and test a
/// generated family against those constants.
pub fn run_theorem_b(cfg: &TheoremBConfig, sink: &mut dyn Sink) -> Result<bool> {
    sink.record("config", to_value(cfg));
    let mut r = rng::derived(cfg.seed, "theorem-b");
    let points: Vec<Slope> = (0..cfg.samples).map(|_| random_slope(&mut r, cfg.max_height)).collect();
    let delta = estimate_delta(&FareyMetric, &points, 1_000_000, cfg.seed)?;
    sink.record(
        "delta",
        json!({ "delta": delta.delta, "quadruples": delta.quadruples, "exhaustive": delta.exhaustive }),
    );
    let constants = TorusAnnuli::DEFAULT_CONSTANTS;
    let h = FactorSpec::cyclic(MappingClass::twist_at_infinity(1), vec![Slope::infinity()], 4);
    let definite = definite_distance_scan(&h, &points, constants);
    sink.record("definite_distance", to_value(&definite));
    let k = definite.k_emp.unwrap_or(definite.k_closed_form);
    let h2 = FactorSpec::cyclic(twist_about(&Slope::infinity(), 2), vec![Slope::infinity()], 4);
    let bound = gromov_bound_scan(&h2, &points, delta.delta, k);
    sink.record("gromov_bound", to_value(&bound));
    let k_prime = Rational::new(bound.k_prime_emp.halves(), 2);
    let (a, d) = theorem_b_constants(k_prime, Rational::new(delta.delta.halves(), 2))?;
    // Separation of the generated family is about 2D', misalignment about D' − 8.
    let dprime = (a.ceil().to_integer() + 8).max((d / 2).ceil().to_integer() + 3).max(9) as u64;
    sink.record("constants", json!({ "a": a.to_string(), "d": d.to_string(), "dprime": dprime }));

    let fam = prop91_generate(dprime, &Slope::infinity(), -1..=1, constants.m, 2)?;
    let stamp = Stamp { constants, delta: delta.delta };
    let a_half = HalfInt::from_halves((a * 2).ceil().to_integer());
    let certs = certify(&fam.family, stamp, d.ceil().to_integer() as u64, a_half, None)?;
    sink.record("certificates", to_value(&certs));
    let f = &fam.family.factors;
    let fp = free_product_check(f, WordBudget { syllables: 6, syllable_letters: 1 }, IdentityMode::Projective);
    sink.record("free_product", to_value(&fp));
    let ball = build_ball(f, cfg.radius)?;
    let qi = qi_scan(&phi(&ball, f, &Slope::infinity())?, &FareyMetric, None, |p| sink.pair(p))?;
    sink.record("qi_summary", json!({ "summary": qi, "truncated_cosets": ball.truncated.len() }));

    // The constants are sufficient, not sharp: see how smaller families fare.
    for smaller in 9..dprime {
        let fam = prop91_generate(smaller, &Slope::infinity(), -1..=1, constants.m, 2)?;
        let f = &fam.family.factors;
        let ball = build_ball(f, cfg.radius.min(3))?;
        let small_qi = qi_scan(&phi(&ball, f, &Slope::infinity())?, &FareyMetric, None, |_| {})?;
        let fp = free_product_check(f, WordBudget { syllables: 4, syllable_letters: 1 }, IdentityMode::Projective);
        sink.record(
            "smaller_family",
            json!({
                "dprime": smaller,
                "separation_min": check_separated(&fam.family, 0).min,
                "misalignment_min": check_misaligned(&fam.family, HalfInt::ZERO).min,
                "half_minus_four": small_qi.half_minus_four,
                "no_relation": fp.no_relation,
            }),
        );
    }
    Ok(verdict(
        sink,
        &[
            ("gromov_bound", bound.holds),
            ("separated", certs.separation.pass),
            ("misaligned", certs.misalignment.pass),
            ("free_product", fp.no_relation),
            ("half_minus_four", qi.half_minus_four),
        ],
    ))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct Example92Config {
    pub d: u64,
    pub alpha: Slope,
    /// Defaults to a slope at distance exactly `d` from `alpha`.
    pub beta: Option<Slope>,
    pub syllables: usize,
    pub constants: Constants,
}

impl Default for Example92Config {
    fn default() -> Self {
        Example92Config {
            d: 5,
            alpha: Slope::infinity(),
            beta: None,
            syllables: 6,
            constants: TorusAnnuli::DEFAULT_CONSTANTS,
        }
    }
}

/// The non-example: separated but not misaligned, and not a free product. Passes
/// when all three of those are observed.
pub fn run_example92(cfg: &Example92Config, sink: &mut dyn Sink) -> Result<bool> {
    sink.record("config", to_value(cfg));
    let beta = match &cfg.beta {
        Some(b) => b.clone(),
        None => slope_at_distance(&cfg.alpha, cfg.d)?,
    };
    let ex = example92_generate(cfg.d, &cfg.alpha, &beta, cfg.constants.m, cfg.syllables)?;
    sink.record(
        "family",
        json!({ "alpha": ex.alpha, "beta": ex.beta, "power": ex.power, "factors": ex.family.factors }),
    );
    sink.record("separation", to_value(&ex.separation));
    sink.record("misalignment", to_value(&ex.misalignment));
    sink.record("free_product", to_value(&ex.free_product));
    let short_relation = ex.free_product.witness.as_ref().is_some_and(|w| w.len() <= cfg.syllables);
    Ok(verdict(
        sink,
        &[
            ("separated", ex.separation.pass),
            ("not_misaligned", !ex.misalignment.pass),
            ("relation_found", short_relation),
        ],
    ))
}
