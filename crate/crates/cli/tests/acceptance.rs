//! Acceptance criteria, one test each. Every test prints a single
//! `criterion NN PASS|FAIL` line straight to stdout so the lines survive
//! output capture.

use std::io::Write;
use std::time::Instant;

use orlicz_cli::suite::{approximation_trail, unbounded_witness, verify_suite, Check};
use orlicz_core::adjoint::{adjoint_density_index, duality_pairing_check};
use orlicz_core::compop::{
    boundedness_verdict, composite_domain_check, density_verdict, domain_membership, operator_norm_estimate,
    sum_domain_check, truncation_approximants, BoundedStatus, DensityStatus,
};
use orlicz_core::gen::{Generator, Instance};
use orlicz_core::lp::lp_density_verdict;
use orlicz_core::measure::h_finiteness;
use orlicz_core::norms::{luxemburg_norm, modular, modular_value, orlicz_norm};
use orlicz_core::tail::{Monomial, TailLaw};
use orlicz_core::{
    Extension, MapLaw, MeasureSpace, Partition, SimpleFunction, TailSum, Transformation, WeightLaw, YoungFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;

fn report(n: u32, name: &str, failures: &[String], extra: &str) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    let detail = failures.first().map(|f| format!(" first failure: {f}")).unwrap_or_default();
    let line = format!("criterion {n:>2} {status} {name} ({extra}){detail}\n");
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn finish(n: u32, name: &str, failures: Vec<String>, extra: String) {
    report(n, name, &failures, &extra);
    assert!(failures.is_empty(), "criterion {n}: {} failures, first: {}", failures.len(), failures[0]);
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn battery(count: usize) -> Vec<Instance> {
    Generator::new(SEED).instances(count)
}

fn piecewise_samples() -> Vec<YoungFunction> {
    vec![
        YoungFunction::piecewise(vec![(0.0, 0.0), (1.0, 0.5), (2.0, 2.0)], Extension::Slope(3.0)).unwrap(),
        YoungFunction::piecewise(vec![(0.0, 0.0), (0.5, 0.0), (1.5, 1.0), (3.0, 4.0)], Extension::Infinite).unwrap(),
        YoungFunction::piecewise(vec![(0.0, 0.0), (0.25, 0.125), (4.0, 10.0)], Extension::Slope(7.5)).unwrap(),
    ]
}

/// Closed-form complementary functions, written out independently.
fn oracle_conjugate(phi: &YoungFunction) -> Option<Box<dyn Fn(f64) -> f64>> {
    match phi.clone() {
        YoungFunction::PowerAbs { p } if p > 1.0 => {
            let q = p / (p - 1.0);
            Some(Box::new(move |y: f64| (p - 1.0) * (y / p).powf(q)))
        }
        YoungFunction::PowerOverP { p } => {
            let q = p / (p - 1.0);
            Some(Box::new(move |y: f64| y.powf(q) / q))
        }
        YoungFunction::ExpMinusOne => Some(Box::new(|y: f64| if y <= 1.0 { 0.0 } else { y * y.ln() - y + 1.0 })),
        YoungFunction::AbsValue | YoungFunction::PowerAbs { .. } => {
            Some(Box::new(|y: f64| if y <= 1.0 { 0.0 } else { f64::INFINITY }))
        }
        YoungFunction::ConjugateOf { of } => {
            let of = *of;
            Some(Box::new(move |y: f64| of.eval(y)))
        }
        YoungFunction::Piecewise(_) => None,
    }
}

#[test]
fn criterion_01_conjugate_involution() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let grid: Vec<f64> = (0..512).map(|k| 10f64.powf(-4.0 + 8.0 * k as f64 / 511.0)).collect();
    let mut families: Vec<YoungFunction> = [1.5, 2.0, 3.0].iter().map(|&p| YoungFunction::power_abs(p)).collect();
    families.extend(piecewise_samples());
    for phi in &families {
        let back = phi.conjugate().conjugate();
        let end = phi.domain_end();
        for &x in grid.iter().filter(|x| **x <= end) {
            let (a, b) = (phi.eval(x), back.eval(x));
            if rel(a, b) > 1e-8 {
                failures.push(format!("{}: Φ({x}) = {a}, Φ** = {b}", phi.label()));
            }
        }
        if let YoungFunction::Piecewise(pl) = phi {
            for (x, v) in pl.breakpoints() {
                if back.eval(x) != v {
                    failures.push(format!("{}: breakpoint ({x}, {v}) maps to {}", phi.label(), back.eval(x)));
                }
            }
            // the breakpoint transform applied twice, with no memo
            let raw = pl.legendre().legendre();
            for &x in grid.iter().filter(|x| **x <= end) {
                if rel(pl.eval(x), raw.eval(x)) > 1e-8 {
                    failures.push(format!("{}: raw transform at {x}: {} vs {}", phi.label(), raw.eval(x), pl.eval(x)));
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 1.0 {
        failures.push(format!("runtime {elapsed:.3} s ≥ 1 s"));
    }
    finish(1, "conjugate involution", failures, format!("{} families, 512-point grid, {elapsed:.3} s", families.len()));
}

#[test]
fn criterion_02_young_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = Vec::new();
    let mut families = vec![
        YoungFunction::power_abs(1.5),
        YoungFunction::power_abs(2.0),
        YoungFunction::power_abs(3.0),
        YoungFunction::power_over_p(1.5),
        YoungFunction::power_over_p(4.0),
        YoungFunction::ExpMinusOne,
        YoungFunction::AbsValue,
        YoungFunction::conjugate_of(YoungFunction::power_abs(3.0)),
    ];
    families.extend(piecewise_samples());
    let mut matched = 0;
    for phi in &families {
        let psi = phi.conjugate();
        for _ in 0..10_000 {
            let x = rng.gen_range(0.0..5.0f64).min(phi.domain_end());
            let y = rng.gen_range(0.0..5.0f64);
            let gap = phi.young_gap(x, y);
            if gap < -1e-12 {
                failures.push(format!("{}: gap {gap} at ({x}, {y})", phi.label()));
            }
            let (lo, hi) = phi.derivatives(x);
            for s in [lo, hi] {
                if s.is_finite() && psi.eval(s).is_finite() && phi.eval(x).is_finite() {
                    matched += 1;
                    let gap = phi.young_gap(x, s);
                    if gap.abs() > 1e-9 * (1.0 + x * s) {
                        failures.push(format!("{}: matched pair ({x}, {s}) has gap {gap}", phi.label()));
                    }
                }
            }
        }
    }
    finish(2, "young inequality", failures, format!("{} families × 10^4 pairs, {matched} matched pairs", families.len()));
}

#[test]
fn criterion_03_norm_sandwich() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for inst in battery(200) {
        let lux = luxemburg_norm(&inst.space, &inst.phi, &inst.f).unwrap().value;
        let orl = orlicz_norm(&inst.space, &inst.phi, &inst.f).unwrap().value;
        if !(lux <= orl * (1.0 + 1e-9) && orl <= 2.0 * lux * (1.0 + 1e-9)) {
            failures.push(format!("instance {} ({}): N = {lux}, ‖f‖ = {orl}", inst.id, inst.phi.label()));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 30.0 {
        failures.push(format!("runtime {elapsed:.1} s ≥ 30 s"));
    }
    finish(3, "norm sandwich", failures, format!("200 instances, {elapsed:.2} s"));
}

/// `Φ⁻¹(y)` solved by hand for each family.
fn oracle_inverse(phi: &YoungFunction, y: f64) -> f64 {
    match phi {
        YoungFunction::PowerAbs { p } => y.powf(1.0 / p),
        YoungFunction::PowerOverP { p } => (p * y).powf(1.0 / p),
        YoungFunction::ExpMinusOne => y.ln_1p(),
        YoungFunction::AbsValue => y,
        other => panic!("no oracle for {}", other.label()),
    }
}

#[test]
fn criterion_04_luxemburg_closed_forms() {
    let mut failures = Vec::new();
    let mut gen = Generator::new(SEED);
    let families =
        [YoungFunction::power_abs(1.5), YoungFunction::power_abs(3.0), YoungFunction::power_over_p(2.5), YoungFunction::ExpMinusOne, YoungFunction::AbsValue];
    let mut checks = 0;
    for _ in 0..100 {
        let n = gen.atoms();
        let space = gen.space(n);
        let k = gen.rng().gen_range(1..=n);
        let mut chi = vec![0.0; n];
        let mut mass = 0.0;
        for i in 0..k {
            chi[i] = 1.0;
            mass += space.weight(i);
        }
        let chi = SimpleFunction::new(chi);
        for phi in &families {
            checks += 1;
            let got = luxemburg_norm(&space, phi, &chi).unwrap().value;
            let want = 1.0 / oracle_inverse(phi, 1.0 / mass);
            if rel(got, want) > 1e-9 {
                failures.push(format!("{} μ(A) = {mass}: {got} vs {want}", phi.label()));
            }
        }
        let f = gen.function(n);
        for p in [1.0, 1.5, 2.0, 3.0, 7.0] {
            checks += 1;
            let got = luxemburg_norm(&space, &YoungFunction::power_abs(p), &f).unwrap().value;
            let want = (0..n).map(|i| f.values[i].abs().powf(p) * space.weight(i)).sum::<f64>().powf(1.0 / p);
            if rel(got, want) > 1e-12 {
                failures.push(format!("p = {p}: N = {got}, ‖f‖_p = {want}"));
            }
        }
    }
    finish(4, "luxemburg closed forms", failures, format!("{checks} checks"));
}

/// `sup{∫|f|g dμ : ρ_Ψ(g) ≤ 1}` by a zooming grid over directions of the
/// positive orthant, each scaled onto the boundary of the dual ball.
fn grid_oracle(psi: &dyn Fn(f64) -> f64, a: &[f64], mu: &[f64]) -> f64 {
    let n = a.len();
    let rho = |g: &[f64]| g.iter().zip(mu).map(|(g, m)| if *g == 0.0 { 0.0 } else { psi(*g) * m }).sum::<f64>();
    let value = |u: &[f64]| -> f64 {
        let mut hi = 1.0;
        let scaled = |s: f64| u.iter().map(|x| x * s).collect::<Vec<_>>();
        while rho(&scaled(hi)) <= 1.0 {
            hi *= 2.0;
            if hi > 1e300 {
                return f64::INFINITY;
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if rho(&scaled(mid)) <= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        lo * u.iter().zip(a).zip(mu).map(|((u, a), m)| u * a * m).sum::<f64>()
    };
    let normalize = |u: &mut Vec<f64>| {
        u.iter_mut().for_each(|x| *x = x.max(0.0));
        let s: f64 = u.iter().sum();
        if s > 0.0 {
            u.iter_mut().for_each(|x| *x /= s);
        }
    };
    let mut best_u = vec![1.0 / n as f64; n];
    let mut best = value(&best_u);
    let mut step = 0.5 / n as f64;
    let span = 4i32;
    for _ in 0..40 {
        let mut improved = false;
        let dims = n - 1;
        let total = (2 * span + 1).pow(dims as u32);
        for code in 0..total {
            let mut c = code;
            let mut u = best_u.clone();
            for d in 0..dims {
                let off = (c % (2 * span + 1)) - span;
                c /= 2 * span + 1;
                u[d] += off as f64 * step;
            }
            normalize(&mut u);
            let v = value(&u);
            if v > best {
                best = v;
                best_u = u;
                improved = true;
            }
        }
        if !improved {
            step *= 0.35;
        }
        if step < 1e-9 {
            break;
        }
    }
    best
}

#[test]
fn criterion_05_orlicz_vs_grid_oracle() {
    let mut gen = Generator::new(SEED).with_atoms(2, 4);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let inst = gen.instance();
        let psi = oracle_conjugate(&inst.phi).expect("closed family");
        let (a, mu): (Vec<f64>, Vec<f64>) =
            (0..inst.space.len()).map(|i| (inst.f.values[i].abs(), inst.space.weight(i))).unzip();
        let want = grid_oracle(&*psi, &a, &mu);
        let got = orlicz_norm(&inst.space, &inst.phi, &inst.f).unwrap().value;
        let e = rel(got, want);
        worst = worst.max(e);
        if e > 1e-4 {
            failures.push(format!("instance {} ({}): {got} vs oracle {want}", inst.id, inst.phi.label()));
        }
    }
    finish(5, "orlicz norm vs dual-ball grid oracle", failures, format!("50 instances, worst relative gap {worst:.2e}"));
}

#[test]
fn criterion_06_change_of_variable() {
    let mut failures = Vec::new();
    for inst in battery(200) {
        let s = &inst.space;
        let lhs = modular_value(s, &inst.phi, &s.compose(&inst.f, &inst.map).unwrap()).unwrap();
        let mut rhs = 0.0;
        for y in 0..s.len() {
            let fiber: f64 = (0..s.len()).filter(|&x| inst.map.target(x) == y).map(|x| s.weight(x)).sum();
            // h(y)μ(y) = μ(φ⁻¹{y})
            rhs += inst.phi.eval(inst.f.values[y]) * fiber;
        }
        if rel(lhs, rhs) > 1e-12 {
            failures.push(format!("instance {}: ρ(f∘φ) = {lhs}, ΣΦ(|f|)hμ = {rhs}", inst.id));
        }
    }
    finish(6, "change of variable", failures, "200 instances".into());
}

fn random_partition(rng: &mut ChaCha8Rng, space: &MeasureSpace) -> Partition {
    let n = space.len();
    let k = rng.gen_range(1..=n);
    let mut blocks = vec![Vec::new(); k];
    for i in 0..n {
        let b = if i < k { i } else { rng.gen_range(0..k) };
        blocks[b].push(i);
    }
    Partition::from_blocks(space, blocks).unwrap()
}

#[test]
fn criterion_07_conditional_expectation() {
    let mut gen = Generator::new(SEED);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut failures = Vec::new();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-10 * (1.0 + a.abs().max(b.abs()));
    for id in 0..500 {
        let inst = gen.instance();
        let s = &inst.space;
        let n = s.len();
        let part = random_partition(&mut rng, s);
        let f = &inst.f;
        let e = s.conditional_expectation(f, &part).unwrap();
        let mut fail = |m: String| failures.push(format!("instance {id}: {m}"));
        for b in &part.blocks {
            let mass: f64 = b.iter().map(|&i| s.weight(i)).sum();
            let avg: f64 = b.iter().map(|&i| f.values[i] * s.weight(i)).sum::<f64>() / mass;
            for &i in b {
                if !close(e.values[i], avg) {
                    fail(format!("averaging at atom {i}"));
                }
            }
        }
        let ee = s.conditional_expectation(&e, &part).unwrap();
        let m = s.conditional_expectation(&inst.g, &part).unwrap();
        let pulled = s.conditional_expectation(&m.mul(f).unwrap(), &part).unwrap();
        let abs = s.conditional_expectation(&f.abs(), &part).unwrap();
        let pos = s.conditional_expectation(&f.abs().scale(-1.0), &part).unwrap();
        let jensen = s.conditional_expectation(&f.apply_young(&inst.phi), &part).unwrap();
        for i in 0..n {
            if !close(ee.values[i], e.values[i]) {
                fail(format!("idempotence at atom {i}"));
            }
            if !close(pulled.values[i], m.values[i] * e.values[i]) {
                fail(format!("pull-out at atom {i}"));
            }
            if abs.values[i] < 0.0 || pos.values[i] > 0.0 {
                fail(format!("positivity at atom {i}"));
            }
            if f.values[i] != 0.0 && abs.values[i] <= 0.0 {
                fail(format!("support inclusion at atom {i}"));
            }
            let lhs = inst.phi.eval(e.values[i]);
            if lhs > jensen.values[i] && !close(lhs, jensen.values[i]) {
                fail(format!("Jensen at atom {i}: {lhs} > {}", jensen.values[i]));
            }
        }
        let ne = luxemburg_norm(s, &inst.phi, &e).unwrap().value;
        let nf = luxemburg_norm(s, &inst.phi, f).unwrap().value;
        if ne > nf * (1.0 + 1e-10) {
            fail(format!("contraction: N(Ef) = {ne} > N(f) = {nf}"));
        }
    }
    finish(7, "conditional expectation", failures, "500 instances, 7 laws".into());
}

fn countable_corpus() -> Vec<(String, MeasureSpace, Transformation)> {
    let geo = MeasureSpace::countable(WeightLaw::Geometric { a: 1.0, r: 0.5 }, 16).unwrap();
    let flat = MeasureSpace::countable(WeightLaw::Constant { c: 1.0 }, 16).unwrap();
    let pow = MeasureSpace::countable(WeightLaw::PowerLaw { c: 1.0, s: 2.0 }, 16).unwrap();
    let law = |l: MapLaw| Transformation::from_law(l);
    vec![
        ("identity".into(), geo.clone(), law(MapLaw::Identity)),
        ("geometric collapse".into(), geo.clone(), law(MapLaw::Constant { m: 1 })),
        ("constant collapse".into(), flat.clone(), law(MapLaw::Constant { m: 1 })),
        ("geometric shift".into(), geo.clone(), law(MapLaw::Shift { k: 1 })),
        ("geometric doubling".into(), geo.clone(), law(MapLaw::Multiply { k: 2 })),
        ("geometric halving".into(), geo, law(MapLaw::Divide { k: 2 })),
        ("flat halving".into(), flat.clone(), law(MapLaw::Divide { k: 2 })),
        ("flat pair swap".into(), flat, law(MapLaw::PairSwap)),
        ("power-law shift".into(), pow.clone(), law(MapLaw::Shift { k: 3 })),
        ("power-law collapse".into(), pow, law(MapLaw::Constant { m: 2 })),
    ]
}

#[test]
fn criterion_08_density_coherence() {
    let phi = YoungFunction::power_abs(2.0);
    let mut failures = Vec::new();
    let mut check = |name: &str, space: &MeasureSpace, map: &Transformation| -> Option<DensityStatus> {
        let lp = lp_density_verdict(space, map, 2.0).unwrap();
        let facets = [&lp.verdict.h_facet, &lp.verdict.sigma_facet, &lp.measure_facet];
        let decisive: Vec<_> = facets.iter().filter(|v| v.is_decisive()).collect();
        if decisive.windows(2).any(|w| !w[0].agrees_with(w[1])) {
            failures.push(format!("{name}: facets disagree {facets:?}"));
        }
        let v = density_verdict(space, &phi, map).unwrap();
        if matches!(v.status, DensityStatus::Inconclusive { .. }) && decisive.len() == 3 {
            failures.push(format!("{name}: inconclusive despite decisive facets"));
        }
        Some(v.status)
    };
    for inst in battery(200) {
        check(&format!("instance {}", inst.id), &inst.space, &inst.map);
    }
    let corpus = countable_corpus();
    for (name, space, map) in &corpus {
        check(name, space, map);
    }
    let expect = [
        ("identity", true),
        ("geometric collapse", true),
        ("constant collapse", false),
    ];
    for (name, dense) in expect {
        let (_, space, map) = corpus.iter().find(|c| c.0 == name).unwrap();
        let v = density_verdict(space, &phi, map).unwrap();
        let ok = if dense { v.is_dense() } else { matches!(v.status, DensityStatus::NotDenselyDefined { .. }) };
        if !ok {
            failures.push(format!("{name}: expected dense = {dense}, got {:?}", v.status));
        }
    }
    finish(8, "density facet coherence", failures, format!("200 finite + {} countable instances", corpus.len()));
}

#[test]
fn criterion_09_truncation_approximants() {
    let phi = YoungFunction::power_abs(2.0);
    let space = MeasureSpace::countable(WeightLaw::Geometric { a: 1.0, r: 0.5 }, 16).unwrap();
    let map = Transformation::from_law(MapLaw::Constant { m: 1 });
    let f = SimpleFunction::with_tail(vec![], TailLaw::monomial(Monomial::new(1.0, 0.0, 0.5)));
    let norm_f = luxemburg_norm(&space, &phi, &f).unwrap().value;
    let mut failures = Vec::new();
    let mut ns: Vec<usize> = (2..=64).collect();
    ns.extend((7..=20).map(|k| 1usize << k));
    let mut last = f64::INFINITY;
    let mut reached = None;
    for &n in &ns {
        let a = truncation_approximants(&space, &phi, &map, &f, n).unwrap();
        if a.distance > last * (1.0 + 1e-12) {
            failures.push(format!("distance rose at N = {n}: {} > {last}", a.distance));
        }
        last = a.distance;
        if reached.is_none() && a.distance < 1e-6 {
            reached = Some(n);
        }
        let bound = (n as f64 - 1.0) * norm_f;
        if a.image_norm > bound * (1.0 + 1e-9) {
            failures.push(format!("N(C f_N) = {} > (N−1)N(f) = {bound} at N = {n}", a.image_norm));
        }
    }
    if reached.is_none() {
        failures.push(format!("distance still {last} at N = 2^20"));
    }
    if approximation_trail().unwrap() != Check::Pass {
        failures.push("suite approximation trail fails".into());
    }
    finish(9, "truncation approximants", failures, format!("{} values of N, below 1e-6 from N = {reached:?}", ns.len()));
}

#[test]
fn criterion_10_adjoint_duality() {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for inst in battery(200) {
        let phi = match inst.phi {
            YoungFunction::ExpMinusOne => YoungFunction::power_abs(2.0),
            ref other => other.clone(),
        };
        let r = duality_pairing_check(&inst.space, &phi, &inst.map, &inst.f, &inst.g).unwrap();
        let s = &inst.space;
        // independent pairing with the explicit fiber formula
        let lhs: f64 = (0..s.len()).map(|x| inst.f.values[inst.map.target(x)] * inst.g.values[x] * s.weight(x)).sum();
        let scale: f64 = (0..s.len())
            .map(|x| (inst.f.values[inst.map.target(x)] * inst.g.values[x]).abs() * s.weight(x))
            .sum::<f64>()
            .max(1.0);
        let residual = (lhs - r.rhs).abs() / scale;
        worst = worst.max(residual).max(r.residual);
        if residual > 1e-10 || r.residual > 1e-10 {
            failures.push(format!("instance {}: residual {residual:e} / {:e}", inst.id, r.residual));
        }
    }
    let phi = YoungFunction::power_abs(2.0);
    let geo = MeasureSpace::countable(WeightLaw::Geometric { a: 1.0, r: 0.5 }, 8).unwrap();
    let fin = MeasureSpace::finite_numbered(vec![1.0, 2.0, 0.5, 3.0]).unwrap();
    let mut gen = Generator::new(SEED);
    let mut bijective = vec![
        (geo.clone(), Transformation::from_law(MapLaw::PairSwap)),
        (geo, Transformation::from_law(MapLaw::Identity)),
        (fin.clone(), Transformation::explicit(vec![2, 0, 3, 1])),
    ];
    for _ in 0..20 {
        let n = gen.atoms();
        bijective.push((gen.space(n), gen.permutation(n)));
    }
    for (space, map) in &bijective {
        let d = adjoint_density_index(space, &phi, map).unwrap();
        let finite = h_finiteness(&d.j).is_holds();
        if d.verdict.is_holds() != finite {
            failures.push(format!("J verdict {:?} but finiteness {finite}", d.verdict));
        }
    }
    finish(10, "adjoint duality", failures, format!("200 instances, worst residual {worst:.1e}; {} bijective maps", bijective.len()));
}

#[test]
fn criterion_11_boundedness() {
    let mut failures = Vec::new();
    for inst in battery(200) {
        let v = boundedness_verdict(&inst.space, &inst.phi, &inst.map).unwrap();
        match v.status {
            BoundedStatus::EverywhereDefinedAndBounded { sup_h, bound } => {
                let h = inst.space.radon_nikodym(&inst.map).unwrap();
                let sup = h.values.iter().cloned().fold(0.0, f64::max);
                if rel(sup, sup_h) > 1e-12 {
                    failures.push(format!("instance {}: sup h = {sup}, reported {sup_h}", inst.id));
                }
                let est = operator_norm_estimate(&inst.space, &inst.phi, &inst.map, 16, inst.id as u64).unwrap();
                if est > bound * (1.0 + 1e-9) {
                    failures.push(format!("instance {}: estimate {est} > bound {bound}", inst.id));
                }
            }
            other => failures.push(format!("instance {}: {other:?}", inst.id)),
        }
    }
    let space = MeasureSpace::countable(WeightLaw::Geometric { a: 1.0, r: 0.5 }, 16).unwrap();
    let map = Transformation::from_law(MapLaw::Multiply { k: 2 });
    let phi = YoungFunction::power_abs(2.0);
    match boundedness_verdict(&space, &phi, &map).unwrap().status {
        BoundedStatus::NotEverywhereDefined { witness, .. } => {
            let base = modular(&space, &phi, &witness).unwrap();
            let image = modular(&space, &phi, &space.compose(&witness, &map).unwrap()).unwrap();
            if !matches!(base, TailSum::Finite { .. }) || image != TailSum::Infinite {
                failures.push(format!("witness not tail-certified: ρ(f) = {base:?}, ρ(f∘φ) = {image:?}"));
            }
        }
        other => failures.push(format!("unbounded instance gave {other:?}")),
    }
    if unbounded_witness().unwrap() != Check::Pass {
        failures.push("suite witness check fails".into());
    }
    finish(11, "boundedness", failures, "200 finite instances + unbounded witness".into());
}

#[test]
fn criterion_12_sum_and_composite_domains() {
    let mut failures = Vec::new();
    let mut gen = Generator::new(SEED + 7);
    let mut checks = 0;
    for inst in battery(200) {
        let s = &inst.space;
        let psi = gen.map(s.len());
        let d = domain_membership(s, &inst.phi, &inst.map, &inst.f).unwrap();
        let sum = sum_domain_check(s, &inst.phi, 0.7, &inst.map, 2.0, &psi, &inst.f).unwrap();
        let comp = composite_domain_check(s, &inst.phi, &inst.map, &psi, &inst.f).unwrap();
        checks += 3;
        if !d.agree || !sum.agree || !comp.agree {
            failures.push(format!("instance {}: {d:?} {sum:?} {comp:?}", inst.id));
        }
    }
    finish(12, "sum and composite domain facets", failures, format!("{checks} checks on 200 instances"));
}

#[test]
fn criterion_13_full_suite() {
    let start = Instant::now();
    let (summary, _) = verify_suite(None, SEED, 200);
    let elapsed = start.elapsed().as_secs_f64();
    let mut failures: Vec<String> =
        summary.first_failures.iter().map(|f| format!("{} on {}: {}", f.property, f.instance, f.detail)).collect();
    if elapsed >= 60.0 {
        failures.push(format!("runtime {elapsed:.1} s ≥ 60 s"));
    }
    finish(
        13,
        "verify suite",
        failures,
        format!("{} checks, {} failures, {elapsed:.2} s", summary.checks, summary.failures),
    );
}
