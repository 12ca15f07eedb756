//! Discrete σ-finite measure spaces, transformations and conditional
//! expectation.
//!
//! Every atom has positive weight, so the only null set is `∅` and "almost
//! everywhere" means "at every atom". Countable spaces carry closed-form
//! weight laws; quantities depending on the tail are summed in closed form
//! or reported as unresolved.

mod function;
mod partition;
mod space;
mod transform;

use serde::{Deserialize, Serialize};

pub use function::{ext_real, SimpleFunction};
pub use partition::{Partition, TailBlocks};
pub use space::{MeasureSpace, WeightLaw};
pub use transform::{Fiber, MapLaw, Transformation};

use crate::error::{Error, Result};
use crate::tail::{Phase, TailLaw, TailSum};
use crate::verdict::Verdict;

/// Periodic selection of tail atoms: index `i ≥ from` belongs to the set when
/// `residues[(i + 1) % residues.len()]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailSet {
    pub from: usize,
    pub residues: Vec<bool>,
}

/// A set of atoms: explicit indices plus an optional periodic tail.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AtomSet {
    pub indices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailSet>,
}

impl AtomSet {
    pub fn empty() -> Self {
        AtomSet::default()
    }

    pub fn of(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        AtomSet { indices, tail: None }
    }

    pub fn everything(space: &MeasureSpace) -> Self {
        AtomSet {
            indices: (0..space.len()).collect(),
            tail: space.is_countable().then(|| TailSet { from: space.len(), residues: vec![true] }),
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        if let Some(t) = &self.tail {
            if i >= t.from {
                return t.residues[(i + 1) % t.residues.len()];
            }
        }
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty() && self.tail.as_ref().is_none_or(|t| t.residues.iter().all(|r| !r))
    }

    /// `χ_E`.
    pub fn indicator(&self, space: &MeasureSpace) -> SimpleFunction {
        let from = self.tail.as_ref().map(|t| t.from).unwrap_or(0);
        let len = self.indices.last().map(|i| i + 1).unwrap_or(0).max(from).max(if space.is_countable() { 0 } else { space.len() });
        let values = (0..len).map(|i| if self.contains(i) { 1.0 } else { 0.0 }).collect();
        match &self.tail {
            Some(t) => SimpleFunction::with_tail(
                values,
                TailLaw::Periodic {
                    phases: t
                        .residues
                        .iter()
                        .map(|r| if *r { Phase::Exact(crate::tail::Monomial::constant(1.0)) } else { Phase::Zero })
                        .collect(),
                },
            ),
            None => SimpleFunction::new(values),
        }
    }

    pub fn labels(&self, space: &MeasureSpace) -> Vec<String> {
        let mut out: Vec<String> = self.indices.iter().map(|i| space.label(*i)).collect();
        if let Some(t) = &self.tail {
            out.push(format!("tail from {} ({} of {} residues)", t.from + 1, t.residues.iter().filter(|r| **r).count(), t.residues.len()));
        }
        out
    }
}

impl MeasureSpace {
    fn check_len(&self, f: &SimpleFunction) -> Result<()> {
        f.validate()?;
        if !self.is_countable() && (f.len() != self.len() || f.has_tail()) {
            return Err(Error::InvalidFunction(format!(
                "function has {} values on a space of {} atoms",
                f.len(),
                self.len()
            )));
        }
        Ok(())
    }

    /// `∫ |f| dμ` over prefix and tail.
    pub fn integral_abs(&self, f: &SimpleFunction) -> Result<TailSum> {
        self.check_len(f)?;
        let head: f64 = f.values.iter().enumerate().map(|(i, v)| crate::mul0(v.abs(), self.weight(i))).sum();
        let head = TailSum::exact(head);
        Ok(match self.weight_monomial() {
            None => head,
            Some(w) => head.add(f.tail().sum_weighted(&w, f.len() as u64)),
        })
    }

    /// `∫ f dμ` for absolutely summable `f`.
    pub fn integral(&self, f: &SimpleFunction) -> Result<f64> {
        self.check_len(f)?;
        let mut head = 0.0;
        for (i, v) in f.values.iter().enumerate() {
            head += crate::mul0(*v, self.weight(i));
        }
        if head.is_nan() {
            return Err(Error::Divergent("integrand takes both +∞ and −∞".into()));
        }
        match self.weight_monomial() {
            None => Ok(head),
            Some(w) if f.has_tail() => Ok(head + f.tail().signed_sum(&w, f.len() as u64)?),
            Some(_) => Ok(head),
        }
    }

    /// `μ_f(E) = ∫_E f dμ` for `f ≥ 0`.
    pub fn weighted_measure(&self, f: &SimpleFunction, set: &AtomSet) -> Result<TailSum> {
        if !self.is_countable() {
            if let Some(i) = set.indices.iter().find(|i| **i >= self.len()) {
                return Err(Error::UnknownAtom(format!("index {i}")));
            }
        }
        if set.is_empty() {
            return Ok(TailSum::ZERO);
        }
        let chi = set.indicator(self);
        let len = f.len().max(chi.len());
        let f = f.extended(len)?;
        if f.values.iter().any(|v| *v < 0.0) {
            return Err(Error::InvalidFunction("μ_f needs f ≥ 0".into()));
        }
        self.integral_abs(&f.mul(&chi.extended(len)?)?)
    }

    /// `μ(φ⁻¹(F)) = 0` whenever `μ(F) = 0`: automatic with positive weights.
    pub fn nonsingular_check(&self, phi: &Transformation) -> Result<Verdict> {
        phi.validate(self)?;
        Ok(Verdict::holds("every atom has positive weight, so the only null set is ∅ and φ⁻¹(∅) = ∅"))
    }

    /// σ-finiteness of `μ` on `φ⁻¹(Σ)`, decided from fiber measures and
    /// cross-checked against finiteness of `h`.
    pub fn sigma_finite_check(&self, phi: &Transformation) -> Result<Verdict> {
        phi.validate(self)?;
        let h = self.radon_nikodym(phi)?;
        let direct = self.fiber_finiteness(phi);
        let via_h = h_finiteness(&h);
        if direct.is_decisive() && via_h.is_decisive() && direct.decision() != via_h.decision() {
            return Ok(Verdict::inconclusive(format!(
                "fiber measures and h disagree: {direct:?} vs {via_h:?}"
            )));
        }
        Ok(direct)
    }

    fn fiber_finiteness(&self, phi: &Transformation) -> Verdict {
        let horizon = match self.radon_nikodym(phi) {
            Ok(h) => h.len(),
            Err(e) => return Verdict::inconclusive(e.to_string()),
        };
        let mut unresolved = None;
        for y in 0..horizon {
            match phi.fiber_measure(self, y) {
                TailSum::Infinite => {
                    return Verdict::fails(
                        format!("fiber φ⁻¹({{{}}}) has infinite measure", self.label(y)),
                        Some(y),
                    )
                }
                TailSum::Unresolved { .. } => unresolved = Some(y),
                _ => {}
            }
        }
        if let Some(y) = unresolved {
            return Verdict::inconclusive(format!("measure of φ⁻¹({{{}}}) unresolved", self.label(y)));
        }
        // past the horizon every fiber is a finite set of law-governed atoms
        let cover = if self.is_countable() {
            "fibers φ⁻¹({y}) have finite measure; beyond the explicit prefix each is a finite set of atoms; \
             their countable union is X"
        } else {
            "finite measure space: the fibers φ⁻¹({y}) are a finite cover of X by sets of finite measure"
        };
        Verdict::holds(cover)
    }

    /// Increasing sets `B_n` of finite measure with `f < n` on `B_n` and
    /// union `X`.
    pub fn exhaustion<'a>(&'a self, f: &'a SimpleFunction) -> Result<Exhaustion<'a>> {
        if let Some(i) = f.values.iter().position(|v| *v == f64::INFINITY) {
            return Err(Error::InvalidFunction(format!("f = +∞ at atom {}", self.label(i))));
        }
        Ok(Exhaustion { space: self, f, n: 0 })
    }

    /// `S(f) = {f ≠ 0}`.
    pub fn support(&self, f: &SimpleFunction) -> AtomSet {
        let indices = f.values.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, _)| i).collect();
        let tail = match f.tail().as_ref() {
            TailLaw::Periodic { phases } if f.has_tail() => {
                let p = phases.len();
                // phases[j] describes atoms n ≡ j; residues are indexed the same way
                Some(TailSet { from: f.len(), residues: (0..p).map(|j| phases[j] != Phase::Zero).collect() })
            }
            TailLaw::Unresolved { .. } => Some(TailSet { from: f.len(), residues: vec![true] }),
            _ => None,
        };
        AtomSet { indices, tail }
    }
}

/// `h < ∞` at every atom, as a verdict.
pub fn h_finiteness(h: &SimpleFunction) -> Verdict {
    if let Some(i) = h.values.iter().position(|v| *v == f64::INFINITY) {
        return Verdict::fails(format!("h = +∞ at atom index {i}"), Some(i));
    }
    if h.values.iter().any(|v| v.is_nan()) {
        return Verdict::inconclusive("h could not be summed at some atom");
    }
    match h.tail().as_ref() {
        TailLaw::Unresolved { reason } => Verdict::inconclusive(reason.clone()),
        _ => Verdict::holds("h is finite at every explicit atom and its tail law is finite"),
    }
}

/// Lazy sequence `B_1, B_2, …` from [`MeasureSpace::exhaustion`].
pub struct Exhaustion<'a> {
    space: &'a MeasureSpace,
    f: &'a SimpleFunction,
    n: usize,
}

impl Exhaustion<'_> {
    /// `B_n`: `{f < n}` on finite spaces, `{1..n} ∩ {f < n}` on countable ones.
    pub fn set(&self, n: usize) -> Vec<usize> {
        let reach = if self.space.is_countable() { n } else { self.space.len() };
        (0..reach)
            .filter(|&i| match self.f.at(i) {
                Some(v) => v < n as f64,
                None => {
                    let t = self.f.tail();
                    let ph = t.phase(i as u64 + 1);
                    ph.and_then(|p| p.upper()).is_some_and(|u| u.at(i as u64 + 1) < n as f64)
                }
            })
            .collect()
    }
}

impl Iterator for Exhaustion<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        self.n += 1;
        Some(self.set(self.n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighted_measure_examples() {
        let s = MeasureSpace::finite(vec!["a".into(), "b".into()], vec![1.0, 2.0]).unwrap();
        let one = SimpleFunction::new(vec![1.0, 1.0]);
        assert_eq!(s.weighted_measure(&one, &AtomSet::of(vec![0, 1])).unwrap(), TailSum::exact(3.0));
        assert_eq!(s.weighted_measure(&one, &AtomSet::empty()).unwrap(), TailSum::ZERO);
        assert!(s.weighted_measure(&one, &AtomSet::of(vec![5])).is_err());
        let c = MeasureSpace::countable(WeightLaw::Constant { c: 1.0 }, 8).unwrap();
        let one = SimpleFunction::with_tail(vec![], TailLaw::constant(1.0));
        assert!(c.weighted_measure(&one, &AtomSet::everything(&c)).unwrap().is_infinite());
    }

    #[test]
    fn sigma_finiteness_examples() {
        let collapse = Transformation::from_law(MapLaw::Constant { m: 1 });
        let g = MeasureSpace::countable(WeightLaw::Geometric { a: 1.0, r: 0.5 }, 8).unwrap();
        assert!(g.sigma_finite_check(&collapse).unwrap().is_holds());
        let c = MeasureSpace::countable(WeightLaw::Constant { c: 1.0 }, 8).unwrap();
        let v = c.sigma_finite_check(&collapse).unwrap();
        assert!(v.is_fails());
        let s = MeasureSpace::uniform(3);
        assert!(s.sigma_finite_check(&Transformation::explicit(vec![0, 0, 2])).unwrap().is_holds());
    }

    #[test]
    fn exhaustion_examples() {
        let s = MeasureSpace::uniform(3);
        let zero = SimpleFunction::zeros(3);
        assert_eq!(s.exhaustion(&zero).unwrap().next().unwrap(), vec![0, 1, 2]);
        let c = MeasureSpace::countable(WeightLaw::Constant { c: 1.0 }, 4).unwrap();
        let id = SimpleFunction::with_tail(vec![], TailLaw::monomial(crate::tail::Monomial::new(1.0, 1.0, 1.0)));
        let ex = c.exhaustion(&id).unwrap();
        assert_eq!(ex.set(5), vec![0, 1, 2, 3]);
        let spike = SimpleFunction::new(vec![1e3, 0.0]);
        let s2 = MeasureSpace::uniform(2);
        let ex = s2.exhaustion(&spike).unwrap();
        assert!(!ex.set(1000).contains(&0));
        assert!(ex.set(1001).contains(&0));
        assert!(s2.exhaustion(&SimpleFunction::new(vec![f64::INFINITY, 0.0])).is_err());
    }

    #[test]
    fn support_examples() {
        let s = MeasureSpace::uniform(3);
        assert!(s.support(&SimpleFunction::zeros(3)).is_empty());
        assert_eq!(s.support(&SimpleFunction::new(vec![0.0, 3.0, 0.0])).indices, vec![1]);
    }
}
