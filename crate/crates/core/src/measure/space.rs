use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tail::{Monomial, TailSum};

/// Closed-form atom weights `μ({n})`, `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum WeightLaw {
    /// `μ({n}) = c`.
    Constant { c: f64 },
    /// `μ({n}) = a·rⁿ`.
    Geometric { a: f64, r: f64 },
    /// `μ({n}) = c·n^{−s}`.
    PowerLaw { c: f64, s: f64 },
}

impl WeightLaw {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        let ok = match *self {
            WeightLaw::Constant { c } => pos(c),
            WeightLaw::Geometric { a, r } => pos(a) && r > 0.0 && r < 1.0,
            WeightLaw::PowerLaw { c, s } => pos(c) && pos(s),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpace(format!("weight law parameters out of range: {self:?}")))
        }
    }

    pub fn monomial(&self) -> Monomial {
        match *self {
            WeightLaw::Constant { c } => Monomial::constant(c),
            WeightLaw::Geometric { a, r } => Monomial::new(a, 0.0, r),
            WeightLaw::PowerLaw { c, s } => Monomial::new(c, -s, 1.0),
        }
    }

    pub fn weight(&self, n: u64) -> f64 {
        match *self {
            WeightLaw::Constant { c } => c,
            WeightLaw::Geometric { a, r } => a * r.powf(n as f64),
            WeightLaw::PowerLaw { c, s } => c * (n as f64).powf(-s),
        }
    }

    /// `Σ_{n>m} μ({n})`.
    pub fn mass_beyond(&self, m: u64) -> TailSum {
        crate::tail::sum_progression(&self.monomial(), m, 0, 1)
    }
}

/// σ-finite discrete measure space.
///
/// Atoms are addressed by a 0-based index into the explicit prefix; on a
/// countable space index `i` is the atom `n = i + 1` and atoms beyond the
/// truncation depth form the tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub enum MeasureSpace {
    Finite { ids: Vec<String>, weights: Vec<f64> },
    Countable { law: WeightLaw, depth: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SpaceRepr {
    Finite { atoms: Vec<(String, f64)> },
    Countable { weights: WeightLaw, depth: usize },
}

impl TryFrom<SpaceRepr> for MeasureSpace {
    type Error = Error;

    fn try_from(r: SpaceRepr) -> Result<Self> {
        match r {
            SpaceRepr::Finite { atoms } => {
                let (ids, weights) = atoms.into_iter().unzip();
                MeasureSpace::finite(ids, weights)
            }
            SpaceRepr::Countable { weights, depth } => MeasureSpace::countable(weights, depth),
        }
    }
}

impl From<MeasureSpace> for SpaceRepr {
    fn from(s: MeasureSpace) -> Self {
        match s {
            MeasureSpace::Finite { ids, weights } => SpaceRepr::Finite { atoms: ids.into_iter().zip(weights).collect() },
            MeasureSpace::Countable { law, depth } => SpaceRepr::Countable { weights: law, depth },
        }
    }
}

impl MeasureSpace {
    pub fn finite(ids: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if ids.is_empty() || ids.len() != weights.len() {
            return Err(Error::InvalidSpace("a finite space needs one weight per atom and at least one atom".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidSpace(format!("atom weights must be positive and finite, got {w}")));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = ids.iter().find(|id| !seen.insert(id.as_str())) {
            return Err(Error::InvalidSpace(format!("duplicate atom id `{dup}`")));
        }
        Ok(MeasureSpace::Finite { ids, weights })
    }

    /// Finite space with atoms named `1..=n`.
    pub fn finite_numbered(weights: Vec<f64>) -> Result<Self> {
        let ids = (1..=weights.len()).map(|i| i.to_string()).collect();
        MeasureSpace::finite(ids, weights)
    }

    pub fn uniform(n: usize) -> Self {
        MeasureSpace::finite_numbered(vec![1.0; n]).expect("n ≥ 1")
    }

    pub fn countable(law: WeightLaw, depth: usize) -> Result<Self> {
        law.validate()?;
        if depth == 0 {
            return Err(Error::InvalidSpace("truncation depth must be positive".into()));
        }
        Ok(MeasureSpace::Countable { law, depth })
    }

    pub fn is_countable(&self) -> bool {
        matches!(self, MeasureSpace::Countable { .. })
    }

    pub fn law(&self) -> Option<WeightLaw> {
        match self {
            MeasureSpace::Countable { law, .. } => Some(*law),
            MeasureSpace::Finite { .. } => None,
        }
    }

    /// Length of the explicit prefix.
    pub fn len(&self) -> usize {
        match self {
            MeasureSpace::Finite { weights, .. } => weights.len(),
            MeasureSpace::Countable { depth, .. } => *depth,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn with_depth(&self, depth: usize) -> Self {
        match self {
            MeasureSpace::Countable { law, .. } => MeasureSpace::Countable { law: *law, depth },
            s => s.clone(),
        }
    }

    /// Weight of the atom at index `i`; countable spaces accept any index.
    pub fn weight(&self, i: usize) -> f64 {
        match self {
            MeasureSpace::Finite { weights, .. } => weights[i],
            MeasureSpace::Countable { law, .. } => law.weight(i as u64 + 1),
        }
    }

    pub fn weights(&self, len: usize) -> Vec<f64> {
        (0..len).map(|i| self.weight(i)).collect()
    }

    pub fn weight_monomial(&self) -> Option<Monomial> {
        self.law().map(|l| l.monomial())
    }

    pub fn label(&self, i: usize) -> String {
        match self {
            MeasureSpace::Finite { ids, .. } => ids[i].clone(),
            MeasureSpace::Countable { .. } => (i + 1).to_string(),
        }
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        match self {
            MeasureSpace::Finite { ids, .. } => {
                ids.iter().position(|x| x == id).ok_or_else(|| Error::UnknownAtom(id.into()))
            }
            MeasureSpace::Countable { .. } => match id.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(n - 1),
                _ => Err(Error::UnknownAtom(id.into())),
            },
        }
    }

    /// `μ` of the atoms at index `≥ len` (zero on finite spaces).
    pub fn mass_beyond(&self, len: usize) -> TailSum {
        match self {
            MeasureSpace::Finite { weights, .. } => {
                TailSum::exact(weights.iter().skip(len).sum())
            }
            MeasureSpace::Countable { law, .. } => law.mass_beyond(len as u64),
        }
    }

    pub fn total_mass(&self) -> TailSum {
        self.mass_beyond(0)
    }
}
