use orlicz_core::adjoint::adjoint_apply;
use orlicz_core::compop::change_of_variable_check;
use orlicz_core::gen::Generator;
use orlicz_core::norms::{holder_pairing, luxemburg_norm, modular_value, orlicz_norm};
use orlicz_core::{Partition, SimpleFunction, YoungFunction};
use proptest::prelude::*;
use rand::Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn random_blocks(gen: &mut Generator, n: usize) -> Vec<Vec<usize>> {
    let k = gen.rng().gen_range(1..=n);
    let mut blocks = vec![Vec::new(); k];
    for i in 0..n {
        let b = if i < k { i } else { gen.rng().gen_range(0..k) };
        blocks[b].push(i);
    }
    blocks
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn luxemburg_norm_axioms(seed in any::<u64>(), k in -5.0f64..5.0) {
        let mut gen = Generator::new(seed).with_atoms(2, 12);
        let n = gen.atoms();
        let space = gen.space(n);
        let phi = gen.young();
        let f = gen.function(n);
        let g = gen.function(n);
        let nf = luxemburg_norm(&space, &phi, &f).unwrap().value;
        let ng = luxemburg_norm(&space, &phi, &g).unwrap().value;
        let nk = luxemburg_norm(&space, &phi, &f.scale(k)).unwrap().value;
        prop_assert!(rel(nk, k.abs() * nf) < 1e-9 || (k == 0.0 && nk == 0.0));
        let ns = luxemburg_norm(&space, &phi, &f.add(&g).unwrap()).unwrap().value;
        prop_assert!(ns <= (nf + ng) * (1.0 + 1e-9));
        prop_assert_eq!(luxemburg_norm(&space, &phi, &SimpleFunction::zeros(n)).unwrap().value, 0.0);
        prop_assert!(nf > 0.0);
    }

    #[test]
    fn norm_sandwich(seed in any::<u64>()) {
        let mut gen = Generator::new(seed).with_atoms(2, 10);
        let n = gen.atoms();
        let space = gen.space(n);
        let phi = gen.young();
        let f = gen.function(n);
        let lux = luxemburg_norm(&space, &phi, &f).unwrap().value;
        let orl = orlicz_norm(&space, &phi, &f).unwrap().value;
        prop_assert!(lux <= orl * (1.0 + 1e-9), "{} > {}", lux, orl);
        prop_assert!(orl <= 2.0 * lux * (1.0 + 1e-9), "{} > 2·{}", orl, lux);
    }

    #[test]
    fn young_inequality(p in 1.05f64..6.0, x in 0.0f64..20.0, y in 0.0f64..20.0) {
        for phi in [YoungFunction::power_abs(p), YoungFunction::power_over_p(p), YoungFunction::ExpMinusOne] {
            prop_assert!(phi.young_gap(x, y) >= -1e-12 * (1.0 + x * y));
        }
    }

    #[test]
    fn conditional_expectation_laws(seed in any::<u64>()) {
        let mut gen = Generator::new(seed).with_atoms(2, 20);
        let n = gen.atoms();
        let space = gen.space(n);
        let part = Partition::from_blocks(&space, random_blocks(&mut gen, n)).unwrap();
        let f = gen.function(n);
        let e = space.conditional_expectation(&f, &part).unwrap();
        // averaging over each block
        for b in &part.blocks {
            let lhs: f64 = b.iter().map(|&i| e.values[i] * space.weight(i)).sum();
            let rhs: f64 = b.iter().map(|&i| f.values[i] * space.weight(i)).sum();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }
        // idempotence
        let ee = space.conditional_expectation(&e, &part).unwrap();
        for (a, b) in ee.values.iter().zip(&e.values) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
        // pull-out with a block-measurable multiplier
        let m = space.conditional_expectation(&gen.function(n), &part).unwrap();
        let lhs = space.conditional_expectation(&m.mul(&f).unwrap(), &part).unwrap();
        let rhs = m.mul(&e).unwrap();
        for (a, b) in lhs.values.iter().zip(&rhs.values) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
        // positivity and Jensen
        let abs = space.conditional_expectation(&f.abs(), &part).unwrap();
        let phi = gen.young();
        let jensen = space.conditional_expectation(&f.apply_young(&phi), &part).unwrap();
        for i in 0..n {
            prop_assert!(abs.values[i] >= -1e-12);
            let lhs = phi.eval(e.values[i]);
            prop_assert!(lhs <= jensen.values[i] * (1.0 + 1e-10) + 1e-10);
        }
        // contraction
        let ne = luxemburg_norm(&space, &phi, &e).unwrap().value;
        let nf = luxemburg_norm(&space, &phi, &f).unwrap().value;
        prop_assert!(ne <= nf * (1.0 + 1e-10));
    }

    #[test]
    fn change_of_variable(seed in any::<u64>()) {
        let mut gen = Generator::new(seed);
        let inst = gen.instance();
        let r = change_of_variable_check(&inst.space, &inst.phi, &inst.f, &inst.map).unwrap();
        prop_assert!(r.verdict.is_holds(), "{:?}", r);
        let direct = modular_value(&inst.space, &inst.phi, &inst.space.compose(&inst.f, &inst.map).unwrap()).unwrap();
        let h = inst.space.radon_nikodym(&inst.map).unwrap();
        let oracle: f64 = (0..inst.space.len())
            .map(|i| inst.phi.eval(inst.f.values[i]) * h.values[i] * inst.space.weight(i))
            .sum();
        prop_assert!(rel(direct, oracle) <= 1e-12);
    }

    #[test]
    fn adjoint_duality(seed in any::<u64>()) {
        let mut gen = Generator::new(seed);
        let n = gen.atoms();
        let space = gen.space(n);
        let phi = gen.young_delta2();
        let map = gen.map(n);
        let f = gen.function(n);
        let g = gen.function(n);
        let a = adjoint_apply(&space, &phi, &map, &g).unwrap();
        let lhs = holder_pairing(&space, &space.compose(&f, &map).unwrap(), &g).unwrap();
        let rhs = holder_pairing(&space, &f, &a).unwrap();
        let scale: f64 = (0..n).map(|i| (f.values[map.target(i)] * g.values[i]).abs() * space.weight(i)).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale.max(1.0));
    }

    #[test]
    fn conjugate_involution(p in 1.1f64..6.0, x in 1e-3f64..1e3) {
        let phi = YoungFunction::power_abs(p);
        let back = phi.conjugate().conjugate();
        prop_assert!(rel(back.eval(x), phi.eval(x)) <= 1e-8);
    }
}
