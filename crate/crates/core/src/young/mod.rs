//! Young functions, their complementary functions and growth conditions.
//!
//! A [`YoungFunction`] is a descriptor; evaluation goes through a canonical
//! form in which every conjugate of a closed-form family is itself closed
//! form. Only piecewise-linear functions are conjugated algorithmically.
//!
//! Young's inequality is `xy ≤ Φ(x) + Ψ(y)` with `Ψ` the complementary
//! function; [`YoungFunction::young_gap`] returns the slack.

mod growth;
mod piecewise;

use std::borrow::Cow;

use serde::{Deserialize, Serialize};

pub use growth::{
    delta2_probe, delta_prime_probe, n_function_probe, nabla_prime_probe, sum_bound_constants,
    GrowthStatus, GrowthVerdict, ProbeRange, SumBounds,
};
pub use piecewise::{Extension, PiecewiseLinear};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum YoungFunction {
    /// `|x|^p`, `p ≥ 1`.
    PowerAbs { p: f64 },
    /// `|x|^p / p`, `p > 1`.
    PowerOverP { p: f64 },
    /// `e^{|x|} − 1`.
    ExpMinusOne,
    /// `|x|`.
    AbsValue,
    Piecewise(PiecewiseLinear),
    ConjugateOf { of: Box<YoungFunction> },
}

/// Closed-form representative used for evaluation.
#[derive(Debug, Clone, PartialEq)]
enum Canon<'a> {
    PowerAbs(f64),
    PowerOverP(f64),
    Exp,
    Abs,
    Piecewise(Cow<'a, PiecewiseLinear>),
    /// `(p−1)(y/p)^{p/(p−1)}`, the complement of `|x|^p`.
    ConjPowerAbs(f64),
    /// `y ln y − y + 1` for `y ≥ 1`, zero below; the complement of `e^x − 1`.
    ConjExp,
}

fn abs_conjugate() -> PiecewiseLinear {
    PiecewiseLinear::new(vec![(0.0, 0.0), (1.0, 0.0)], Extension::Infinite).unwrap()
}

fn abs_piecewise() -> PiecewiseLinear {
    PiecewiseLinear::new(vec![(0.0, 0.0)], Extension::Slope(1.0)).unwrap()
}

/// `(1+d) ln(1+d) − d`, accurate near `d = 0`.
fn xlogx_shift(d: f64) -> f64 {
    if d.abs() < 0.1 {
        let mut sum = 0.0;
        let mut pow = d * d;
        for k in 2..40 {
            let k = k as f64;
            let term = pow / (k * (k - 1.0));
            sum += if (k as i64) % 2 == 0 { term } else { -term };
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
            pow *= d;
        }
        sum
    } else {
        (1.0 + d) * (1.0 + d).ln() - d
    }
}

impl<'a> Canon<'a> {
    fn conjugate(self) -> Canon<'a> {
        match self {
            Canon::PowerAbs(p) if p == 1.0 => Canon::Piecewise(Cow::Owned(abs_conjugate())),
            Canon::PowerAbs(p) => Canon::ConjPowerAbs(p),
            Canon::PowerOverP(p) => Canon::PowerOverP(p / (p - 1.0)),
            Canon::Exp => Canon::ConjExp,
            Canon::Abs => Canon::Piecewise(Cow::Owned(abs_conjugate())),
            Canon::Piecewise(pl) => Canon::Piecewise(Cow::Owned(pl.conjugate())),
            Canon::ConjPowerAbs(p) => Canon::PowerAbs(p),
            Canon::ConjExp => Canon::Exp,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let x = x.abs();
        match self {
            Canon::PowerAbs(p) => x.powf(*p),
            Canon::PowerOverP(p) => x.powf(*p) / p,
            Canon::Exp => x.exp_m1(),
            Canon::Abs => x,
            Canon::Piecewise(pl) => pl.eval(x),
            Canon::ConjPowerAbs(p) => {
                let q = p / (p - 1.0);
                (p - 1.0) * (x / p).powf(q)
            }
            Canon::ConjExp => {
                if x <= 1.0 {
                    0.0
                } else {
                    xlogx_shift(x - 1.0)
                }
            }
        }
    }

    fn log_eval(&self, x: f64) -> f64 {
        let x = x.abs();
        if x == 0.0 {
            return f64::NEG_INFINITY;
        }
        match self {
            Canon::PowerAbs(p) => p * x.ln(),
            Canon::PowerOverP(p) => p * x.ln() - p.ln(),
            Canon::Exp => {
                if x < 30.0 {
                    x.exp_m1().ln()
                } else {
                    x + (-(-x).exp()).ln_1p()
                }
            }
            Canon::Abs => x.ln(),
            Canon::ConjPowerAbs(p) => {
                let q = p / (p - 1.0);
                (p - 1.0).ln() + q * (x.ln() - p.ln())
            }
            _ => self.eval(x).ln(),
        }
    }

    fn derivatives(&self, x: f64) -> (f64, f64) {
        let x = x.abs();
        let both = |d: f64| (d, d);
        match self {
            Canon::PowerAbs(p) => both(p * x.powf(p - 1.0)),
            Canon::PowerOverP(p) => both(x.powf(p - 1.0)),
            Canon::Exp => both(x.exp()),
            Canon::Abs => (if x == 0.0 { 0.0 } else { 1.0 }, 1.0),
            Canon::Piecewise(pl) => pl.derivatives(x),
            Canon::ConjPowerAbs(p) => both((x / p).powf(1.0 / (p - 1.0))),
            Canon::ConjExp => both(if x <= 1.0 { 0.0 } else { x.ln() }),
        }
    }

    fn inverse(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 0.0;
        }
        match self {
            Canon::PowerAbs(p) => y.powf(1.0 / p),
            Canon::PowerOverP(p) => (p * y).powf(1.0 / p),
            Canon::Exp => y.ln_1p(),
            Canon::Abs => y,
            Canon::Piecewise(pl) => pl.generalized_inverse(y),
            Canon::ConjPowerAbs(p) => {
                let q = p / (p - 1.0);
                p * (y / (p - 1.0)).powf(1.0 / q)
            }
            Canon::ConjExp => {
                if y.is_infinite() {
                    return f64::INFINITY;
                }
                // Ψ is continuous and strictly increasing on [1, ∞)
                let mut lo = 1.0;
                let mut hi = 2.0;
                while self.eval(hi) <= y {
                    lo = hi;
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.eval(mid) > y {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                if y == 0.0 {
                    1.0
                } else {
                    hi
                }
            }
        }
    }

    fn domain_end(&self) -> f64 {
        match self {
            Canon::Piecewise(pl) => pl.domain_end(),
            _ => f64::INFINITY,
        }
    }

    fn homogeneous(&self) -> Option<(f64, f64)> {
        match self {
            Canon::PowerAbs(p) => Some((1.0, *p)),
            Canon::PowerOverP(p) => Some((1.0 / p, *p)),
            Canon::Abs => Some((1.0, 1.0)),
            Canon::ConjPowerAbs(p) => {
                let q = p / (p - 1.0);
                Some(((p - 1.0) * p.powf(-q), q))
            }
            Canon::Piecewise(pl) => match (pl.breakpoints().count(), pl.extension()) {
                (1, Extension::Slope(s)) => Some((s, 1.0)),
                _ => None,
            },
            _ => None,
        }
    }

    fn into_young(self) -> YoungFunction {
        match self {
            Canon::PowerAbs(p) => YoungFunction::PowerAbs { p },
            Canon::PowerOverP(p) => YoungFunction::PowerOverP { p },
            Canon::Exp => YoungFunction::ExpMinusOne,
            Canon::Abs => YoungFunction::AbsValue,
            Canon::Piecewise(pl) => YoungFunction::Piecewise(pl.into_owned()),
            Canon::ConjPowerAbs(p) => YoungFunction::ConjugateOf {
                of: Box::new(YoungFunction::PowerAbs { p }),
            },
            Canon::ConjExp => YoungFunction::ConjugateOf { of: Box::new(YoungFunction::ExpMinusOne) },
        }
    }
}

impl YoungFunction {
    pub fn power_abs(p: f64) -> Self {
        YoungFunction::PowerAbs { p }
    }

    pub fn power_over_p(p: f64) -> Self {
        YoungFunction::PowerOverP { p }
    }

    pub fn piecewise(breakpoints: Vec<(f64, f64)>, ext: Extension) -> Result<Self> {
        Ok(YoungFunction::Piecewise(PiecewiseLinear::new(breakpoints, ext)?))
    }

    pub fn conjugate_of(of: YoungFunction) -> Self {
        YoungFunction::ConjugateOf { of: Box::new(of) }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            YoungFunction::PowerAbs { p } if !(p.is_finite() && *p >= 1.0) => {
                Err(Error::InvalidYoung(format!("power_abs needs p ≥ 1, got {p}")))
            }
            YoungFunction::PowerOverP { p } if !(p.is_finite() && *p > 1.0) => {
                Err(Error::InvalidYoung(format!("power_over_p needs p > 1, got {p}")))
            }
            YoungFunction::ConjugateOf { of } => of.validate(),
            _ => Ok(()),
        }
    }

    fn canon(&self) -> Canon<'_> {
        match self {
            YoungFunction::PowerAbs { p } if *p == 1.0 => Canon::Abs,
            YoungFunction::PowerAbs { p } => Canon::PowerAbs(*p),
            YoungFunction::PowerOverP { p } => Canon::PowerOverP(*p),
            YoungFunction::ExpMinusOne => Canon::Exp,
            YoungFunction::AbsValue => Canon::Abs,
            YoungFunction::Piecewise(pl) => Canon::Piecewise(Cow::Borrowed(pl)),
            YoungFunction::ConjugateOf { of } => of.canon().conjugate(),
        }
    }

    /// `Φ(|x|)`, possibly `+∞`.
    pub fn eval(&self, x: f64) -> f64 {
        if x.is_infinite() {
            return f64::INFINITY;
        }
        self.canon().eval(x)
    }

    /// `ln Φ(|x|)`, stable where `Φ` itself would overflow.
    pub fn log_eval(&self, x: f64) -> f64 {
        self.canon().log_eval(x)
    }

    /// The complementary function `Ψ(y) = sup_{x≥0} (x|y| − Φ(x))`.
    pub fn conjugate(&self) -> YoungFunction {
        match self {
            YoungFunction::ConjugateOf { of } => (**of).clone(),
            YoungFunction::PowerOverP { p } => YoungFunction::PowerOverP { p: p / (p - 1.0) },
            YoungFunction::Piecewise(pl) => YoungFunction::Piecewise(pl.conjugate()),
            YoungFunction::AbsValue | YoungFunction::PowerAbs { p: 1.0 } => {
                YoungFunction::Piecewise(abs_conjugate())
            }
            other => YoungFunction::conjugate_of(other.clone()),
        }
    }

    /// Canonical closed-form description of the same function.
    pub fn normalized(&self) -> YoungFunction {
        match self.canon() {
            Canon::Piecewise(pl) if *pl == abs_piecewise() => YoungFunction::AbsValue,
            c => c.into_young(),
        }
    }

    /// `inf{x ≥ 0 : Φ(x) > y}`.
    pub fn generalized_inverse(&self, y: f64) -> f64 {
        self.canon().inverse(y)
    }

    /// `Φ⁻¹(e^{log_y})` without forming `e^{log_y}` when it would overflow.
    pub fn inverse_of_exp(&self, log_y: f64) -> f64 {
        let c = self.canon();
        if log_y < 700.0 {
            return c.inverse(log_y.exp());
        }
        if let Some((coef, p)) = c.homogeneous() {
            return ((log_y - coef.ln()) / p).exp();
        }
        match c {
            Canon::Exp => log_y + (-log_y).exp().ln_1p(),
            Canon::ConjExp => {
                // y ln y − y + 1 = e^L; solve in log space
                let mut lo = 1.0f64;
                let mut hi = log_y.max(2.0);
                while c.log_eval(hi) < log_y {
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if c.log_eval(mid) > log_y {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
            _ => c.inverse(f64::INFINITY),
        }
    }

    /// One-sided derivatives of `Φ` restricted to `[0, ∞)` at `|x|`.
    pub fn derivatives(&self, x: f64) -> (f64, f64) {
        self.canon().derivatives(x)
    }

    /// `Φ'(0+)`.
    pub fn slope_at_zero(&self) -> f64 {
        self.derivatives(0.0).1
    }

    /// `sup{x : Φ(x) < ∞}`.
    pub fn domain_end(&self) -> f64 {
        self.canon().domain_end()
    }

    /// `(k, p)` when `Φ(x) = k |x|^p` exactly.
    pub fn homogeneous(&self) -> Option<(f64, f64)> {
        self.canon().homogeneous()
    }

    /// Smallest `s` with `Φ(x) ≤ s·x` for every `x ≥ 0`, if finite.
    pub fn linear_majorant(&self) -> Option<f64> {
        match self.canon() {
            Canon::Abs => Some(1.0),
            Canon::Piecewise(pl) => match pl.extension() {
                Extension::Slope(s) => Some(s),
                Extension::Infinite => None,
            },
            _ => None,
        }
    }

    /// `Φ(x) + Ψ(y) − xy` for `x, y ≥ 0`.
    pub fn young_gap(&self, x: f64, y: f64) -> f64 {
        let (x, y) = (x.abs(), y.abs());
        let phi = self.eval(x);
        let psi = self.conjugate().eval(y);
        if phi.is_infinite() || psi.is_infinite() {
            return f64::INFINITY;
        }
        phi + psi - x * y
    }

    pub fn label(&self) -> String {
        match self {
            YoungFunction::PowerAbs { p } => format!("power_abs:{p}"),
            YoungFunction::PowerOverP { p } => format!("power_over_p:{p}"),
            YoungFunction::ExpMinusOne => "exp_minus_one".into(),
            YoungFunction::AbsValue => "abs_value".into(),
            YoungFunction::Piecewise(pl) => {
                let pts: Vec<String> = pl.breakpoints().map(|(x, v)| format!("({x},{v})")).collect();
                format!("piecewise[{}]", pts.join(","))
            }
            YoungFunction::ConjugateOf { of } => format!("conjugate_of({})", of.label()),
        }
    }
}
