//! Randomized property battery plus the canonical corpus.

use std::collections::BTreeMap;

use orlicz_core::adjoint::{adjoint_density_index, duality_pairing_check};
use orlicz_core::compop::{
    boundedness_verdict, composite_domain_check, density_verdict, domain_membership, sum_domain_check,
    truncation_approximants, BoundedStatus, DensityStatus,
};
use orlicz_core::gen::{Generator, Instance};
use orlicz_core::lp::multiplication_equivalence_check;
use orlicz_core::measure::h_finiteness;
use orlicz_core::norms::{luxemburg_norm, modular_value, orlicz_norm};
use orlicz_core::tail::TailLaw;
use orlicz_core::{MapLaw, MeasureSpace, SimpleFunction, Transformation, WeightLaw, YoungFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::scenario::Scenario;

pub const DEFAULT_COUNT: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    Pass,
    Fail(String),
    Skip(String),
}

type CoreResult<T> = orlicz_core::Result<T>;

fn ensure(ok: bool, detail: impl FnOnce() -> String) -> Check {
    if ok {
        Check::Pass
    } else {
        Check::Fail(detail())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub instance: String,
    pub property: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub skipped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyTally {
    pub property: String,
    pub checks: usize,
    pub failures: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub property: String,
    pub instance: String,
    pub detail: String,
    /// Smallest sub-instance found that still fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Instance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub count: usize,
    pub corpus: usize,
    pub scenario_checks: usize,
    pub checks: usize,
    pub failures: usize,
    pub skipped: usize,
    pub properties: Vec<PropertyTally>,
    pub first_failures: Vec<Failure>,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Properties checked on every random finite instance.
pub const PROPERTIES: &[&str] = &[
    "young_inequality",
    "conjugate_involution",
    "norm_sandwich",
    "luxemburg_indicator",
    "change_of_variable",
    "conditional_expectation",
    "density_facets",
    "adjoint_duality",
    "boundedness",
    "domain_identities",
    "lp_multiplication",
];

pub fn run_property(name: &str, inst: &Instance) -> Check {
    let r = match name {
        "young_inequality" => young_inequality(inst),
        "conjugate_involution" => Ok(conjugate_involution(&inst.phi)),
        "norm_sandwich" => norm_sandwich(inst),
        "luxemburg_indicator" => luxemburg_indicator(inst),
        "change_of_variable" => change_of_variable(inst),
        "conditional_expectation" => conditional_expectation(inst),
        "density_facets" => density_facets(inst),
        "adjoint_duality" => adjoint_duality(inst),
        "boundedness" => boundedness(inst),
        "domain_identities" => domain_identities(inst),
        "lp_multiplication" => lp_multiplication(inst),
        other => return Check::Skip(format!("unknown property `{other}`")),
    };
    r.unwrap_or_else(|e| Check::Fail(format!("error: {e}")))
}

fn young_inequality(inst: &Instance) -> CoreResult<Check> {
    let phi = &inst.phi;
    let psi = phi.conjugate();
    let mut rng = ChaCha8Rng::seed_from_u64(inst.id as u64);
    for _ in 0..64 {
        let (x, y) = (rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0));
        let gap = phi.young_gap(x, y);
        if gap < -1e-12 * (1.0 + x * y) {
            return Ok(Check::Fail(format!("gap {gap} at ({x}, {y})")));
        }
        // equality at y ∈ ∂Φ(x)
        let slope = phi.derivatives(x).1;
        if slope.is_finite() && psi.eval(slope).is_finite() {
            let gap = phi.young_gap(x, slope);
            if gap.abs() > 1e-9 * (1.0 + x * slope) {
                return Ok(Check::Fail(format!("gap {gap} at the matched pair ({x}, {slope})")));
            }
        }
    }
    Ok(Check::Pass)
}

pub fn conjugate_involution(phi: &YoungFunction) -> Check {
    let back = phi.conjugate().conjugate();
    for k in 0..64 {
        let x = 10f64.powf(-3.0 + 6.0 * k as f64 / 63.0);
        let (a, b) = (phi.eval(x), back.eval(x));
        if rel(a, b) > 1e-8 {
            return Check::Fail(format!("Φ({x}) = {a} but Ψ*({x}) = {b}"));
        }
    }
    Check::Pass
}

fn norm_sandwich(inst: &Instance) -> CoreResult<Check> {
    let lux = luxemburg_norm(&inst.space, &inst.phi, &inst.f)?.value;
    let orl = orlicz_norm(&inst.space, &inst.phi, &inst.f)?.value;
    Ok(ensure(lux <= orl * (1.0 + 1e-9) && orl <= 2.0 * lux * (1.0 + 1e-9), || {
        format!("N = {lux}, ‖f‖ = {orl}")
    }))
}

fn luxemburg_indicator(inst: &Instance) -> CoreResult<Check> {
    let n = inst.space.len();
    let mut set: Vec<usize> = (0..n).filter(|&i| inst.f.values[i] > 0.0).collect();
    if set.is_empty() {
        set.push(0);
    }
    let mut chi = vec![0.0; n];
    let mut mass = 0.0;
    for &i in &set {
        chi[i] = 1.0;
        mass += inst.space.weight(i);
    }
    let got = luxemburg_norm(&inst.space, &inst.phi, &SimpleFunction::new(chi))?.value;
    let want = 1.0 / inst.phi.generalized_inverse(1.0 / mass);
    Ok(ensure(rel(got, want) <= 1e-9, || format!("N(χ_A) = {got}, expected {want} (μ(A) = {mass})")))
}

fn change_of_variable(inst: &Instance) -> CoreResult<Check> {
    let s = &inst.space;
    let lhs = modular_value(s, &inst.phi, &s.compose(&inst.f, &inst.map)?)?;
    let h = s.radon_nikodym(&inst.map)?;
    let rhs: f64 = (0..s.len()).map(|i| inst.phi.eval(inst.f.values[i]) * h.values[i] * s.weight(i)).sum();
    Ok(ensure(rel(lhs, rhs) <= 1e-12, || format!("ρ(f∘φ) = {lhs}, ∫Φ(f)h dμ = {rhs}")))
}

fn conditional_expectation(inst: &Instance) -> CoreResult<Check> {
    let s = &inst.space;
    let part = s.fiber_partition(&inst.map)?;
    let n = s.len();
    let f = &inst.f;
    let e = s.conditional_expectation(f, &part)?;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-10 * (1.0 + a.abs().max(b.abs()));
    for b in &part.blocks {
        let lhs: f64 = b.iter().map(|&i| e.values[i] * s.weight(i)).sum();
        let rhs: f64 = b.iter().map(|&i| f.values[i] * s.weight(i)).sum();
        if !close(lhs, rhs) {
            return Ok(Check::Fail(format!("averaging: {lhs} ≠ {rhs} on block {b:?}")));
        }
    }
    let ee = s.conditional_expectation(&e, &part)?;
    let m = s.conditional_expectation(&inst.g, &part)?;
    let pulled = s.conditional_expectation(&m.mul(f)?, &part)?;
    let abs = s.conditional_expectation(&f.abs(), &part)?;
    let jensen = s.conditional_expectation(&f.apply_young(&inst.phi), &part)?;
    for i in 0..n {
        if !close(ee.values[i], e.values[i]) {
            return Ok(Check::Fail(format!("idempotence fails at atom {i}")));
        }
        if !close(pulled.values[i], m.values[i] * e.values[i]) {
            return Ok(Check::Fail(format!("pull-out fails at atom {i}")));
        }
        if abs.values[i] < 0.0 {
            return Ok(Check::Fail(format!("positivity fails at atom {i}")));
        }
        if f.values[i] != 0.0 && abs.values[i] == 0.0 {
            return Ok(Check::Fail(format!("support of f is not inside the support of E|f| at atom {i}")));
        }
        let lhs = inst.phi.eval(e.values[i]);
        if lhs > jensen.values[i] && !close(lhs, jensen.values[i]) {
            return Ok(Check::Fail(format!("Jensen fails at atom {i}: {lhs} > {}", jensen.values[i])));
        }
    }
    let ne = luxemburg_norm(s, &inst.phi, &e)?.value;
    let nf = luxemburg_norm(s, &inst.phi, f)?.value;
    Ok(ensure(ne <= nf * (1.0 + 1e-10), || format!("N(Ef) = {ne} > N(f) = {nf}")))
}

fn density_facets(inst: &Instance) -> CoreResult<Check> {
    let v = density_verdict(&inst.space, &inst.phi, &inst.map)?;
    Ok(ensure(v.facets_agree() && v.is_dense(), || format!("{:?}", v.status)))
}

/// Δ₂ stand-in for families outside Δ₂.
fn delta2_young(phi: &YoungFunction) -> YoungFunction {
    match phi {
        YoungFunction::ExpMinusOne => YoungFunction::power_abs(2.0),
        other => other.clone(),
    }
}

fn adjoint_duality(inst: &Instance) -> CoreResult<Check> {
    let r = duality_pairing_check(&inst.space, &delta2_young(&inst.phi), &inst.map, &inst.f, &inst.g)?;
    Ok(ensure(r.residual <= 1e-10, || format!("⟨Cf, g⟩ = {}, ⟨f, C*g⟩ = {}", r.lhs, r.rhs)))
}

fn boundedness(inst: &Instance) -> CoreResult<Check> {
    let v = boundedness_verdict(&inst.space, &inst.phi, &inst.map)?;
    match v.status {
        BoundedStatus::EverywhereDefinedAndBounded { bound, .. } => {
            let est = orlicz_core::compop::operator_norm_estimate(&inst.space, &inst.phi, &inst.map, 8, inst.id as u64)?;
            Ok(ensure(est <= bound * (1.0 + 1e-9), || format!("estimate {est} exceeds the bound {bound}")))
        }
        other => Ok(Check::Fail(format!("finite instance not bounded: {other:?}"))),
    }
}

/// A second map derived from the instance: `φ∘φ`.
fn second_map(inst: &Instance) -> CoreResult<Transformation> {
    inst.map.then(&inst.map, &inst.space)
}

fn domain_identities(inst: &Instance) -> CoreResult<Check> {
    let s = &inst.space;
    let d = domain_membership(s, &inst.phi, &inst.map, &inst.f)?;
    if !d.agree {
        return Ok(Check::Fail(format!("domain facets disagree: {d:?}")));
    }
    let psi = second_map(inst)?;
    let sum = sum_domain_check(s, &inst.phi, 1.5, &inst.map, 0.5, &psi, &inst.f)?;
    if !sum.agree {
        return Ok(Check::Fail(format!("sum domain facets disagree: {sum:?}")));
    }
    let comp = composite_domain_check(s, &inst.phi, &inst.map, &psi, &inst.f)?;
    Ok(ensure(comp.agree, || format!("composite domain facets disagree: {comp:?}")))
}

fn lp_multiplication(inst: &Instance) -> CoreResult<Check> {
    let p = match inst.phi {
        YoungFunction::PowerAbs { p } | YoungFunction::PowerOverP { p } => p,
        _ => 2.0,
    };
    let r = multiplication_equivalence_check(&inst.space, &inst.f, &inst.map, p)?;
    Ok(ensure(r.verdict.is_holds(), || format!("{:?}", r.verdict)))
}

/// Sub-instance on `keep` (closed under the map).
fn restrict(inst: &Instance, keep: &[usize]) -> Option<Instance> {
    let index: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let targets = keep.iter().map(|&i| index.get(&inst.map.target(i)).copied()).collect::<Option<Vec<_>>>()?;
    let pick = |f: &SimpleFunction| SimpleFunction::new(keep.iter().map(|&i| f.values[i]).collect());
    Some(Instance {
        id: inst.id,
        space: MeasureSpace::finite_numbered(keep.iter().map(|&i| inst.space.weight(i)).collect()).ok()?,
        phi: inst.phi.clone(),
        map: Transformation::explicit(targets),
        f: pick(&inst.f),
        g: pick(&inst.g),
    })
}

/// Greedily drops atoms while the property keeps failing.
pub fn shrink(inst: &Instance, property: &str) -> Instance {
    shrink_by(inst, |sub| matches!(run_property(property, sub), Check::Fail(_)))
}

pub fn shrink_by(inst: &Instance, fails: impl Fn(&Instance) -> bool) -> Instance {
    let mut best = inst.clone();
    let mut keep: Vec<usize> = (0..inst.space.len()).collect();
    let mut progress = true;
    while progress && keep.len() > 1 {
        progress = false;
        for k in 0..keep.len() {
            let mut trial = keep.clone();
            trial.remove(k);
            if let Some(sub) = restrict(inst, &trial) {
                if fails(&sub) {
                    keep = trial;
                    best = sub;
                    progress = true;
                    break;
                }
            }
        }
    }
    best
}

/// Hand-built instances with known answers.
pub fn corpus_checks() -> Vec<(String, Check)> {
    let mut out = Vec::new();
    let phi = YoungFunction::power_abs(2.0);
    let geo = MeasureSpace::countable(WeightLaw::Geometric { a: 1.0, r: 0.5 }, 16).unwrap();
    let flat = MeasureSpace::countable(WeightLaw::Constant { c: 1.0 }, 16).unwrap();
    let collapse = Transformation::from_law(MapLaw::Constant { m: 1 });
    let density = |space: &MeasureSpace, map: &Transformation, dense: bool| -> Check {
        match density_verdict(space, &phi, map) {
            Ok(v) if v.is_dense() == dense && v.facets_agree() => Check::Pass,
            Ok(v) => Check::Fail(format!("{:?}", v.status)),
            Err(e) => Check::Fail(e.to_string()),
        }
    };
    out.push(("density/identity".into(), density(&geo, &Transformation::from_law(MapLaw::Identity), true)));
    out.push(("density/geometric_collapse".into(), density(&geo, &collapse, true)));
    out.push(("density/constant_collapse".into(), density(&flat, &collapse, false)));
    if let Ok(v) = density_verdict(&flat, &phi, &collapse) {
        if !matches!(v.status, DensityStatus::NotDenselyDefined { witness: 0, .. }) {
            out.push(("density/constant_collapse_witness".into(), Check::Fail(format!("{:?}", v.status))));
        }
    }
    out.push(("approximation/geometric_collapse".into(), approximation_trail().unwrap_or_else(|e| Check::Fail(e.to_string()))));
    out.push(("boundedness/unbounded_witness".into(), unbounded_witness().unwrap_or_else(|e| Check::Fail(e.to_string()))));
    out.push(("adjoint/bijective_corpus".into(), adjoint_corpus().unwrap_or_else(|e| Check::Fail(e.to_string()))));
    let conj = YoungFunction::power_over_p(3.0).conjugate();
    out.push(("conjugate/power_over_p".into(), ensure(conj == YoungFunction::power_over_p(1.5), || conj.label())));
    let four = MeasureSpace::finite_numbered(vec![4.0]).unwrap();
    let one = SimpleFunction::new(vec![1.0]);
    let norm = |phi: &YoungFunction, want: f64| -> Check {
        match luxemburg_norm(&four, phi, &one) {
            Ok(r) => ensure(rel(r.value, want) <= 1e-12, || format!("{} ≠ {want}", r.value)),
            Err(e) => Check::Fail(e.to_string()),
        }
    };
    out.push(("norm/indicator_power".into(), norm(&phi, 2.0)));
    out.push(("norm/indicator_exp".into(), norm(&YoungFunction::ExpMinusOne, 1.0 / (1.25f64).ln())));
    for phi in [YoungFunction::power_abs(1.5), YoungFunction::power_abs(3.0), YoungFunction::ExpMinusOne] {
        out.push((format!("conjugate/involution/{}", phi.label()), conjugate_involution(&phi)));
    }
    out
}

/// Truncations of a geometric-tail `f` under the collapse on Geometric(1, 1/2).
pub fn approximation_trail() -> CoreResult<Check> {
    let phi = YoungFunction::power_abs(2.0);
    let space = MeasureSpace::countable(WeightLaw::Geometric { a: 1.0, r: 0.5 }, 8)?;
    let map = Transformation::from_law(MapLaw::Constant { m: 1 });
    let f = SimpleFunction::with_tail(vec![], TailLaw::monomial(orlicz_core::Monomial::new(1.0, 0.0, 0.5)));
    let mut last = f64::INFINITY;
    let mut n = 2;
    while n <= 1 << 20 {
        let a = truncation_approximants(&space, &phi, &map, &f, n)?;
        if a.distance > last * (1.0 + 1e-12) {
            return Ok(Check::Fail(format!("distance increased at N = {n}: {} > {last}", a.distance)));
        }
        if a.image_norm > a.bound * (1.0 + 1e-9) + 1e-300 {
            return Ok(Check::Fail(format!("N(C f_N) = {} > {} at N = {n}", a.image_norm, a.bound)));
        }
        last = a.distance;
        if last < 1e-6 {
            return Ok(Check::Pass);
        }
        n *= 2;
    }
    Ok(Check::Fail(format!("distance still {last} at N = 2^20")))
}

pub fn unbounded_witness() -> CoreResult<Check> {
    let space = MeasureSpace::countable(WeightLaw::Geometric { a: 1.0, r: 0.5 }, 16)?;
    let map = Transformation::from_law(MapLaw::Multiply { k: 2 });
    let v = boundedness_verdict(&space, &YoungFunction::power_abs(2.0), &map)?;
    Ok(match v.status {
        BoundedStatus::NotEverywhereDefined { witness, .. } => {
            let base = modular_value(&space, &YoungFunction::power_abs(2.0), &witness)?;
            let image = modular_value(&space, &YoungFunction::power_abs(2.0), &space.compose(&witness, &map)?)?;
            ensure(base.is_finite() && image.is_infinite(), || format!("ρ(f) = {base}, ρ(f∘φ) = {image}"))
        }
        other => Check::Fail(format!("{other:?}")),
    })
}

/// `J` against its own finiteness verdict on bijective maps.
pub fn adjoint_corpus() -> CoreResult<Check> {
    let phi = YoungFunction::power_abs(2.0);
    let geo = MeasureSpace::countable(WeightLaw::Geometric { a: 1.0, r: 0.5 }, 8)?;
    let fin = MeasureSpace::finite_numbered(vec![1.0, 2.0, 0.5, 3.0])?;
    let cases = [
        (geo.clone(), Transformation::from_law(MapLaw::PairSwap)),
        (geo, Transformation::from_law(MapLaw::Identity)),
        (fin.clone(), Transformation::explicit(vec![2, 0, 3, 1])),
        (fin.clone(), Transformation::identity(&fin)),
    ];
    for (space, map) in &cases {
        let d = adjoint_density_index(space, &phi, map)?;
        let finite = h_finiteness(&d.j).is_holds();
        if d.verdict.is_holds() != finite {
            return Ok(Check::Fail(format!("J verdict {:?} disagrees with finiteness {finite}", d.verdict)));
        }
        if let Some(row) = d.containment.iter().find(|r| r.verdict.is_fails()) {
            return Ok(Check::Fail(format!("containment fails: {row:?}")));
        }
    }
    Ok(Check::Pass)
}

/// Checks driven by the functions and maps of a loaded scenario.
pub fn scenario_checks(s: &Scenario, phi: &YoungFunction) -> Vec<(String, Check)> {
    let mut out = Vec::new();
    for (mname, map) in &s.maps {
        let c = match density_verdict(&s.space, phi, map) {
            Ok(v) => ensure(v.facets_agree(), || format!("{:?} / {:?}", v.h_facet, v.sigma_facet)),
            Err(e) => Check::Skip(e.to_string()),
        };
        out.push((format!("scenario/density/{mname}"), c));
        for (fname, f) in &s.functions {
            let c = match domain_membership(&s.space, phi, map, f) {
                Ok(d) => ensure(d.agree || !d.direct.is_decisive() || !d.weighted.is_decisive(), || format!("{d:?}")),
                Err(e) => Check::Skip(e.to_string()),
            };
            out.push((format!("scenario/domain/{mname}/{fname}"), c));
        }
    }
    out
}

fn outcome(instance: String, property: &str, c: Check) -> Outcome {
    let (passed, skipped, detail) = match c {
        Check::Pass => (true, false, None),
        Check::Fail(d) => (false, false, Some(d)),
        Check::Skip(d) => (true, true, Some(d)),
    };
    Outcome { instance, property: property.to_string(), passed, detail, skipped }
}

/// `count` random finite instances from `seed`, the corpus, and the
/// scenario checks when a scenario is given.
pub fn verify_suite(scenario: Option<(&Scenario, &YoungFunction)>, seed: u64, count: usize) -> (SuiteSummary, Vec<Outcome>) {
    let instances = Generator::new(seed).instances(count);
    let mut outcomes: Vec<Outcome> = instances
        .par_iter()
        .flat_map_iter(|inst| {
            PROPERTIES.iter().map(move |p| outcome(format!("random/{:04}", inst.id), p, run_property(p, inst)))
        })
        .collect();
    let corpus = corpus_checks();
    let corpus_len = corpus.len();
    outcomes.extend(corpus.into_iter().map(|(name, c)| outcome(format!("corpus/{name}"), "corpus", c)));
    let mut scenario_len = 0;
    if let Some((s, phi)) = scenario {
        let checks = scenario_checks(s, phi);
        scenario_len = checks.len();
        outcomes.extend(checks.into_iter().map(|(name, c)| outcome(name, "scenario", c)));
    }
    outcomes.sort_by(|a, b| (&a.instance, &a.property).cmp(&(&b.instance, &b.property)));

    let mut tallies: BTreeMap<String, PropertyTally> = BTreeMap::new();
    let mut first: BTreeMap<String, Failure> = BTreeMap::new();
    for o in &outcomes {
        let t = tallies.entry(o.property.clone()).or_insert_with(|| PropertyTally {
            property: o.property.clone(),
            checks: 0,
            failures: 0,
            skipped: 0,
        });
        t.checks += 1;
        t.skipped += o.skipped as usize;
        if !o.passed {
            t.failures += 1;
            first.entry(o.property.clone()).or_insert_with(|| {
                let witness = o
                    .instance
                    .strip_prefix("random/")
                    .and_then(|id| id.parse::<usize>().ok())
                    .map(|id| shrink(&instances[id], &o.property));
                Failure {
                    property: o.property.clone(),
                    instance: o.instance.clone(),
                    detail: o.detail.clone().unwrap_or_default(),
                    witness,
                }
            });
        }
    }
    let summary = SuiteSummary {
        seed,
        count,
        corpus: corpus_len,
        scenario_checks: scenario_len,
        checks: outcomes.len(),
        failures: outcomes.iter().filter(|o| !o.passed).count(),
        skipped: outcomes.iter().filter(|o| o.skipped).count(),
        properties: tallies.into_values().collect(),
        first_failures: first.into_values().collect(),
    };
    (summary, outcomes)
}
