use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tail::{Monomial, Phase, TailLaw};
use crate::young::YoungFunction;

/// Extended reals in JSON: finite numbers, or the strings `"inf"` / `"-inf"`.
pub mod ext_real {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn to_repr(v: f64) -> Repr {
        if v.is_finite() {
            Repr::Num(v)
        } else if v > 0.0 {
            Repr::Text("inf".into())
        } else if v < 0.0 {
            Repr::Text("-inf".into())
        } else {
            Repr::Text("nan".into())
        }
    }

    pub fn parse(s: &str) -> Option<f64> {
        match s.trim() {
            "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
            "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
            t => t.parse().ok().filter(|v: &f64| !v.is_nan()),
        }
    }

    pub fn from_repr(r: Repr) -> Option<f64> {
        match r {
            Repr::Num(v) => Some(v),
            Repr::Text(t) => parse(&t),
        }
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| to_repr(*x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Repr>::deserialize(d)?
            .into_iter()
            .map(|r| from_repr(r).ok_or_else(|| D::Error::custom("expected a number, \"inf\" or \"-inf\"")))
            .collect()
    }

    /// Single-value variant for `#[serde(with = ...)]` on `f64` fields.
    pub mod scalar {
        use super::*;

        pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
            to_repr(*v).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
            from_repr(Repr::deserialize(d)?).ok_or_else(|| D::Error::custom("expected a number, \"inf\" or \"-inf\""))
        }
    }
}

/// Atom-indexed extended-real function.
///
/// `values[i]` is the value at the atom with index `i`; on a countable space
/// atoms past `values.len()` follow `tail` (absent means zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpleFunction {
    #[serde(with = "ext_real")]
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailLaw>,
}

impl SimpleFunction {
    pub fn new(values: Vec<f64>) -> Self {
        SimpleFunction { values, tail: None }
    }

    pub fn with_tail(values: Vec<f64>, tail: TailLaw) -> Self {
        let tail = if tail.is_zero() { None } else { Some(tail) };
        SimpleFunction { values, tail }
    }

    pub fn zeros(len: usize) -> Self {
        SimpleFunction::new(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tail(&self) -> Cow<'_, TailLaw> {
        match &self.tail {
            Some(t) => Cow::Borrowed(t),
            None => Cow::Owned(TailLaw::zero()),
        }
    }

    pub fn has_tail(&self) -> bool {
        self.tail.as_ref().is_some_and(|t| !t.is_zero())
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidFunction("NaN value".into()));
        }
        Ok(())
    }

    /// Value at index `i`, or `None` if the tail only brackets it.
    pub fn at(&self, i: usize) -> Option<f64> {
        match self.values.get(i) {
            Some(v) => Some(*v),
            None => self.tail().eval(i as u64 + 1),
        }
    }

    /// Same function with at least `len` explicit values.
    pub fn extended(&self, len: usize) -> Result<SimpleFunction> {
        if len <= self.values.len() {
            return Ok(self.clone());
        }
        let mut values = self.values.clone();
        for i in self.values.len()..len {
            let v = self.at(i).ok_or_else(|| {
                Error::UnresolvedTail(format!("value at atom {} is only bracketed", i + 1))
            })?;
            values.push(v);
        }
        Ok(SimpleFunction { values, tail: self.tail.clone() })
    }

    pub fn truncated(&self, len: usize) -> SimpleFunction {
        SimpleFunction::new((0..len).map(|i| self.values.get(i).copied().unwrap_or(0.0)).collect())
    }

    pub fn map(&self, op: impl Fn(f64) -> f64, tail_op: impl Fn(&TailLaw) -> TailLaw) -> SimpleFunction {
        SimpleFunction::with_tail(self.values.iter().map(|v| op(*v)).collect(), tail_op(&self.tail()))
    }

    pub fn abs(&self) -> SimpleFunction {
        self.map(f64::abs, TailLaw::abs)
    }

    pub fn scale(&self, k: f64) -> SimpleFunction {
        self.map(|v| crate::mul0(v, k), |t| t.scale(k))
    }

    /// `|f|^p`.
    pub fn abs_pow(&self, p: f64) -> SimpleFunction {
        self.map(
            |v| v.abs().powf(p),
            |t| t.map_phases(|_, ph| pow_phase(ph, p)),
        )
    }

    fn aligned(&self, other: &SimpleFunction) -> Result<(SimpleFunction, SimpleFunction)> {
        let n = self.len().max(other.len());
        Ok((self.extended(n)?, other.extended(n)?))
    }

    pub fn mul(&self, other: &SimpleFunction) -> Result<SimpleFunction> {
        let (a, b) = self.aligned(other)?;
        let values = a.values.iter().zip(&b.values).map(|(x, y)| crate::mul0(*x, *y)).collect();
        Ok(SimpleFunction::with_tail(values, a.tail().mul(&b.tail())))
    }

    pub fn add(&self, other: &SimpleFunction) -> Result<SimpleFunction> {
        let (a, b) = self.aligned(other)?;
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect();
        let start = a.len() as u64;
        Ok(SimpleFunction::with_tail(values, a.tail().add(&b.tail(), start)))
    }

    pub fn sub(&self, other: &SimpleFunction) -> Result<SimpleFunction> {
        self.add(&other.scale(-1.0))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0) && !self.has_tail()
    }

    /// `sup |f|` over prefix and tail; `None` when unbounded or unknown.
    pub fn sup_abs(&self) -> Option<f64> {
        let head = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tail = self.tail().sup_abs(self.len() as u64)?;
        Some(head.max(tail))
    }

    /// `Φ(|f|)` atomwise; the tail is exact for homogeneous `Φ` and
    /// bracketed by convexity otherwise.
    pub fn apply_young(&self, phi: &YoungFunction) -> SimpleFunction {
        let start = self.len() as u64;
        let tail = self.tail();
        let new_tail = match tail.as_ref() {
            TailLaw::Unresolved { .. } => tail.into_owned(),
            t if t.is_zero() => TailLaw::zero(),
            t => {
                let period = t.period();
                t.map_phases(|j, ph| young_phase(phi, ph, start, j, period))
            }
        };
        SimpleFunction::with_tail(self.values.iter().map(|v| phi.eval(*v)).collect(), new_tail)
    }
}

fn pow_phase(ph: &Phase, p: f64) -> Phase {
    match ph {
        Phase::Zero => Phase::Zero,
        Phase::Exact(m) => Phase::Exact(m.powf(p)),
        Phase::Bounded { lo, hi } => Phase::Bounded { lo: lo.powf(p), hi: hi.map(|h| h.powf(p)) },
    }
}

fn young_phase(phi: &YoungFunction, ph: &Phase, start: u64, phase: u64, period: u64) -> Phase {
    if *ph == Phase::Zero {
        return Phase::Zero;
    }
    if let Some((k, p)) = phi.homogeneous() {
        return pow_phase(ph, p).scale(k);
    }
    let lo = ph.lower();
    let lo_inf = lo.inf_over(start, phase, period);
    let lower = if lo_inf > 0.0 {
        let v = phi.eval(lo_inf);
        if v.is_infinite() {
            Monomial::constant(f64::INFINITY)
        } else {
            lo.scale(v / lo_inf)
        }
    } else {
        lo.scale(phi.slope_at_zero())
    };
    let upper = ph.upper().and_then(|hi| {
        let s = hi.sup_over(start, phase, period)?;
        if s == 0.0 {
            return Some(Monomial::constant(0.0));
        }
        let v = phi.eval(s);
        v.is_finite().then(|| hi.scale(v / s))
    });
    Phase::Bounded { lo: lower, hi: upper }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_reals_in_json() {
        let f = SimpleFunction::new(vec![1.5, f64::INFINITY, -2.0]);
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"inf\""));
        assert_eq!(serde_json::from_str::<SimpleFunction>(&text).unwrap(), f);
    }

    #[test]
    fn extension_uses_tail() {
        let f = SimpleFunction::with_tail(vec![1.0], TailLaw::monomial(Monomial::new(1.0, 0.0, 0.5)));
        let g = f.extended(3).unwrap();
        assert_eq!(g.values, vec![1.0, 0.25, 0.125]);
        assert_eq!(f.sup_abs(), Some(1.0));
    }

    #[test]
    fn young_of_tail_brackets_values() {
        let f = SimpleFunction::with_tail(vec![], TailLaw::monomial(Monomial::new(2.0, 0.0, 0.5)));
        let g = f.apply_young(&YoungFunction::ExpMinusOne);
        let t = g.tail();
        let ph = t.phase(1).unwrap();
        for n in 1..30u64 {
            let v = (2.0 * 0.5f64.powi(n as i32)).exp_m1();
            assert!(ph.lower().at(n) <= v * (1.0 + 1e-12));
            assert!(ph.upper().unwrap().at(n) >= v * (1.0 - 1e-12));
        }
        let h = f.apply_young(&YoungFunction::power_abs(2.0));
        assert_eq!(h.at(2), Some(0.0625));
    }
}
