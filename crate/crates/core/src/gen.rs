//! Seeded random finite instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::measure::{MeasureSpace, SimpleFunction, Transformation};
use crate::young::YoungFunction;

pub const MIN_ATOMS: usize = 2;
pub const MAX_ATOMS: usize = 50;

/// One randomized finite instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub id: usize,
    pub space: MeasureSpace,
    pub phi: YoungFunction,
    pub map: Transformation,
    pub f: SimpleFunction,
    pub g: SimpleFunction,
}

#[derive(Debug, Clone)]
pub struct Generator {
    rng: ChaCha8Rng,
    min_atoms: usize,
    max_atoms: usize,
    next_id: usize,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator { rng: ChaCha8Rng::seed_from_u64(seed), min_atoms: MIN_ATOMS, max_atoms: MAX_ATOMS, next_id: 0 }
    }

    pub fn with_atoms(mut self, min: usize, max: usize) -> Self {
        self.min_atoms = min.max(1);
        self.max_atoms = max.max(self.min_atoms);
        self
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Weights log-uniform in `[1e-3, 1e3]`.
    pub fn space(&mut self, n: usize) -> MeasureSpace {
        let w = (0..n).map(|_| 10f64.powf(self.rng.gen_range(-3.0..=3.0))).collect();
        MeasureSpace::finite_numbered(w).expect("positive weights")
    }

    pub fn map(&mut self, n: usize) -> Transformation {
        Transformation::explicit((0..n).map(|_| self.rng.gen_range(0..n)).collect())
    }

    pub fn permutation(&mut self, n: usize) -> Transformation {
        use rand::seq::SliceRandom;
        let mut t: Vec<usize> = (0..n).collect();
        t.shuffle(&mut self.rng);
        Transformation::explicit(t)
    }

    /// Values uniform in `[-10, 10]`.
    pub fn function(&mut self, n: usize) -> SimpleFunction {
        SimpleFunction::new((0..n).map(|_| self.rng.gen_range(-10.0..=10.0)).collect())
    }

    pub fn young(&mut self) -> YoungFunction {
        match self.rng.gen_range(0..6) {
            0 => YoungFunction::power_abs(self.rng.gen_range(1.0..=4.0)),
            1 => YoungFunction::power_over_p(self.rng.gen_range(1.1..=4.0)),
            2 => YoungFunction::power_abs(2.0),
            3 => YoungFunction::AbsValue,
            4 => YoungFunction::ExpMinusOne,
            _ => YoungFunction::conjugate_of(YoungFunction::power_abs(self.rng.gen_range(1.5..=4.0))),
        }
    }

    /// Closed-form families satisfying Δ₂.
    pub fn young_delta2(&mut self) -> YoungFunction {
        loop {
            let phi = self.young();
            if !matches!(phi, YoungFunction::ExpMinusOne) {
                return phi;
            }
        }
    }

    pub fn atoms(&mut self) -> usize {
        self.rng.gen_range(self.min_atoms..=self.max_atoms)
    }

    pub fn instance(&mut self) -> Instance {
        let n = self.atoms();
        let id = self.next_id;
        self.next_id += 1;
        Instance {
            id,
            space: self.space(n),
            phi: self.young(),
            map: self.map(n),
            f: self.function(n),
            g: self.function(n),
        }
    }

    pub fn instances(&mut self, count: usize) -> Vec<Instance> {
        (0..count).map(|_| self.instance()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let a = Generator::new(42).instances(30);
        assert_eq!(a, Generator::new(42).instances(30));
        assert_ne!(a, Generator::new(43).instances(30));
        for inst in &a {
            let n = inst.space.len();
            assert!((MIN_ATOMS..=MAX_ATOMS).contains(&n));
            assert!(inst.space.weights(n).iter().all(|w| (1e-3..=1e3).contains(w)));
            assert!(inst.f.values.iter().all(|v| v.abs() <= 10.0));
            assert!(inst.map.validate(&inst.space).is_ok());
            assert!(inst.phi.validate().is_ok());
        }
    }
}
