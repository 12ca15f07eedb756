//! Modular, Luxemburg (gauge) norm and Orlicz norm.
//!
//! `ρ_Φ(f) = Σ Φ(|f|)μ`, `N_Φ(f) = inf{k > 0 : ρ_Φ(f/k) ≤ 1}` and
//! `‖f‖_Φ = sup{∫|fg| dμ : ρ_Ψ(g) ≤ 1}`; they satisfy
//! `N_Φ(f) ≤ ‖f‖_Φ ≤ 2N_Φ(f)`.

mod orlicz;

use serde::{Deserialize, Serialize};

pub use orlicz::{amemiya_cross_check, orlicz_norm, projected_ascent};

use crate::error::{Error, Result};
use crate::measure::{MeasureSpace, SimpleFunction};
use crate::tail::TailSum;
use crate::verdict::Verdict;
use crate::young::{delta2_probe, ProbeRange, YoungFunction};

pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_DOUBLINGS: usize = 200;
const REFINE_CAP: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    Analytic,
    Bisection,
    DualOptimization,
    BruteForceOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    #[serde(with = "crate::measure::ext_real::scalar")]
    pub value: f64,
    pub method: NormMethod,
    /// Relative uncertainty of `value`.
    pub achieved_tolerance: f64,
}

impl NormResult {
    fn exact(value: f64, method: NormMethod) -> Self {
        NormResult { value, method, achieved_tolerance: 0.0 }
    }
}

/// `ρ_Φ(f)`, as a bracket when the tail is only bounded. Exact tails are
/// materialized further until the bracket is tight.
pub fn modular(space: &MeasureSpace, phi: &YoungFunction, f: &SimpleFunction) -> Result<TailSum> {
    let mut f = f.clone();
    loop {
        let s = space.integral_abs(&f.apply_young(phi))?;
        let loose = match s {
            TailSum::Finite { lo, hi } => hi - lo > 1e-15 * hi,
            _ => false,
        };
        if !loose || !f.has_tail() || f.len() >= REFINE_CAP {
            return Ok(s);
        }
        match f.extended((2 * f.len()).max(64)) {
            Ok(g) => f = g,
            Err(_) => return Ok(s),
        }
    }
}

/// Best available point value of a modular: exact, the upper end of a
/// bracket, `+∞`, or an error when unresolved.
pub fn modular_value(space: &MeasureSpace, phi: &YoungFunction, f: &SimpleFunction) -> Result<f64> {
    match modular(space, phi, f)? {
        TailSum::Finite { hi, .. } => Ok(hi),
        TailSum::Infinite => Ok(f64::INFINITY),
        TailSum::Unresolved { partial } => Err(Error::UnresolvedTail(format!(
            "modular tail unresolved (partial sum {partial})"
        ))),
    }
}

pub fn luxemburg_norm(space: &MeasureSpace, phi: &YoungFunction, f: &SimpleFunction) -> Result<NormResult> {
    luxemburg_norm_tol(space, phi, f, DEFAULT_TOL)
}

pub fn luxemburg_norm_tol(
    space: &MeasureSpace,
    phi: &YoungFunction,
    f: &SimpleFunction,
    tol: f64,
) -> Result<NormResult> {
    if f.is_zero() {
        return Ok(NormResult::exact(0.0, NormMethod::Analytic));
    }
    if let Some((k, p)) = phi.homogeneous() {
        let s = modular(space, &YoungFunction::power_abs(p), f)?;
        return Ok(match s {
            TailSum::Infinite => NormResult::exact(f64::INFINITY, NormMethod::Analytic),
            TailSum::Unresolved { partial } => {
                return Err(Error::UnresolvedTail(format!("Σ|f|^p μ unresolved (partial sum {partial})")))
            }
            TailSum::Finite { lo, hi } => {
                let (a, b) = ((k * lo).powf(1.0 / p), (k * hi).powf(1.0 / p));
                NormResult { value: b, method: NormMethod::Analytic, achieved_tolerance: (b - a) / b }
            }
        });
    }
    let rho = |k: f64| modular(space, phi, &f.scale(1.0 / k));
    let upper = bisect(&rho, |s| s.upper().map(|u| u <= 1.0), tol)?;
    let Some((value, width)) = upper else {
        return Ok(NormResult::exact(f64::INFINITY, NormMethod::Bisection));
    };
    let mut achieved = width;
    if let TailSum::Finite { lo, hi } = rho(value)? {
        if hi > lo {
            if let Some((lower, w)) = bisect(&rho, |s| Some(s.lower() <= 1.0), tol)? {
                achieved = achieved.max(w).max((value - lower) / value);
            }
        }
    }
    Ok(NormResult { value, method: NormMethod::Bisection, achieved_tolerance: achieved })
}

/// Smallest `k` with `admissible(ρ(f/k))`, by doubling/halving from `k = 1`
/// and bisection. `None` when no probed `k` is admissible.
fn bisect(
    rho: &dyn Fn(f64) -> Result<TailSum>,
    admissible: impl Fn(&TailSum) -> Option<bool>,
    tol: f64,
) -> Result<Option<(f64, f64)>> {
    let test = |k: f64| -> Result<bool> {
        let s = rho(k)?;
        if let TailSum::Unresolved { partial } = s {
            return Err(Error::UnresolvedTail(format!("modular tail unresolved (partial sum {partial})")));
        }
        Ok(admissible(&s).unwrap_or(false))
    };
    let (mut lo, mut hi);
    if test(1.0)? {
        hi = 1.0;
        lo = 0.5;
        let mut steps = 0;
        while test(lo)? {
            hi = lo;
            lo *= 0.5;
            steps += 1;
            if steps > MAX_DOUBLINGS {
                return Ok(Some((0.0, 0.0)));
            }
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        let mut steps = 0;
        while !test(hi)? {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > MAX_DOUBLINGS {
                return Ok(None);
            }
        }
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if test(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some((hi, (hi - lo) / hi)))
}

/// `ρ_Ψ(g) ≤ 1`.
pub fn dual_ball_membership(space: &MeasureSpace, psi: &YoungFunction, g: &SimpleFunction) -> Result<bool> {
    match modular(space, psi, g)? {
        TailSum::Infinite => Ok(false),
        TailSum::Finite { hi, .. } if hi <= 1.0 => Ok(true),
        TailSum::Finite { lo, .. } if lo > 1.0 => Ok(false),
        s => Err(Error::UnresolvedTail(format!("cannot place ρ_Ψ(g) relative to 1: {s:?}"))),
    }
}

/// `∫ fg dμ`, required to converge absolutely.
pub fn holder_pairing(space: &MeasureSpace, f: &SimpleFunction, g: &SimpleFunction) -> Result<f64> {
    let fg = f.mul(g)?;
    match space.integral_abs(&fg)? {
        TailSum::Infinite => Err(Error::Divergent("∫|fg| dμ = ∞".into())),
        TailSum::Unresolved { .. } => Err(Error::UnresolvedTail("∫|fg| dμ".into())),
        TailSum::Finite { hi, .. } if hi.is_infinite() => Err(Error::Divergent("∫|fg| dμ = ∞".into())),
        _ => space.integral(&fg),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// `N_Φ(f_n − f)`.
    #[serde(with = "crate::measure::ext_real")]
    pub norm_trail: Vec<f64>,
    /// `ρ_Φ(f_n)`.
    #[serde(with = "crate::measure::ext_real")]
    pub modular_trail: Vec<f64>,
    #[serde(with = "crate::measure::ext_real::scalar")]
    pub target_modular: f64,
    pub norm_converges: bool,
    pub modular_converges: bool,
    pub pointwise_converges: bool,
    pub delta2: bool,
    pub verdict: Verdict,
}

/// Norm convergence must imply modular convergence; modular plus pointwise
/// convergence must imply norm convergence when `Φ ∈ Δ₂`.
pub fn convergence_check(
    space: &MeasureSpace,
    phi: &YoungFunction,
    seq: &[SimpleFunction],
    f: &SimpleFunction,
) -> Result<ConvergenceReport> {
    if seq.is_empty() {
        return Err(Error::InvalidFunction("empty sequence".into()));
    }
    let target_modular = modular_value(space, phi, f)?;
    let target_norm = luxemburg_norm(space, phi, f)?.value;
    let mut norm_trail = Vec::with_capacity(seq.len());
    let mut modular_trail = Vec::with_capacity(seq.len());
    for fn_ in seq {
        norm_trail.push(luxemburg_norm(space, phi, &fn_.sub(f)?)?.value);
        modular_trail.push(modular_value(space, phi, fn_)?);
    }
    let last = seq.len() - 1;
    let norm_converges = norm_trail[last] <= 1e-6 * target_norm.max(1.0);
    let modular_converges =
        (modular_trail[last] - target_modular).abs() <= 1e-4 * target_modular.max(1.0);
    let diff = seq[last].sub(f)?;
    let pointwise_converges = diff.sup_abs().is_some_and(|s| s <= 1e-4 * f.sup_abs().unwrap_or(1.0).max(1.0));
    let delta2 = delta2_probe(phi, ProbeRange::default())?.holds_globally();
    let verdict = if norm_converges && !modular_converges {
        Verdict::fails("norm convergence without modular convergence", None)
    } else if delta2 && modular_converges && pointwise_converges && !norm_converges {
        Verdict::fails("modular and pointwise convergence without norm convergence under Δ₂", None)
    } else {
        Verdict::holds(format!(
            "norm converges: {norm_converges}, modular converges: {modular_converges}, pointwise: {pointwise_converges}, Δ₂: {delta2}"
        ))
    };
    Ok(ConvergenceReport {
        norm_trail,
        modular_trail,
        target_modular,
        norm_converges,
        modular_converges,
        pointwise_converges,
        delta2,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::WeightLaw;
    use crate::tail::{Monomial, TailLaw};

    fn single(w: f64) -> MeasureSpace {
        MeasureSpace::finite_numbered(vec![w]).unwrap()
    }

    #[test]
    fn modular_examples() {
        let s = MeasureSpace::uniform(3);
        assert_eq!(modular(&s, &YoungFunction::power_abs(2.0), &SimpleFunction::zeros(3)).unwrap(), TailSum::ZERO);
        let chi = SimpleFunction::new(vec![1.0]);
        assert_eq!(modular_value(&single(4.0), &YoungFunction::power_abs(2.0), &chi).unwrap(), 4.0);
        let two = SimpleFunction::new(vec![2.0]);
        assert_eq!(modular_value(&single(1.0), &YoungFunction::power_over_p(2.0), &two).unwrap(), 2.0);
    }

    #[test]
    fn luxemburg_examples() {
        let chi = SimpleFunction::new(vec![1.0]);
        let n = luxemburg_norm(&single(4.0), &YoungFunction::power_abs(2.0), &chi).unwrap();
        assert_eq!(n.value, 2.0);
        assert_eq!(n.method, NormMethod::Analytic);
        let n = luxemburg_norm(&single(4.0), &YoungFunction::ExpMinusOne, &chi).unwrap();
        // 1/Φ⁻¹(1/4) = 1/ln(5/4)
        assert!((n.value - 1.0 / 1.25f64.ln()).abs() < 1e-11 * n.value);
        assert_eq!(n.method, NormMethod::Bisection);
        assert_eq!(luxemburg_norm(&single(4.0), &YoungFunction::ExpMinusOne, &SimpleFunction::zeros(1)).unwrap().value, 0.0);
    }

    #[test]
    fn luxemburg_on_countable_tails() {
        let g = MeasureSpace::countable(WeightLaw::Geometric { a: 1.0, r: 0.5 }, 4).unwrap();
        let f = SimpleFunction::with_tail(vec![], TailLaw::monomial(Monomial::new(1.0, 0.0, 0.9)));
        // Σ 0.81ⁿ 0.5ⁿ = 0.405/0.595
        let n = luxemburg_norm(&g, &YoungFunction::power_abs(2.0), &f).unwrap();
        assert!((n.value - (0.405f64 / 0.595).sqrt()).abs() < 1e-14);
        let e = luxemburg_norm(&g, &YoungFunction::ExpMinusOne, &f).unwrap();
        let direct = {
            let vals: Vec<f64> = (1..400).map(|n| 0.9f64.powi(n)).collect();
            let fin = MeasureSpace::finite_numbered((1..400).map(|n| 0.5f64.powi(n)).collect()).unwrap();
            luxemburg_norm(&fin, &YoungFunction::ExpMinusOne, &SimpleFunction::new(vals)).unwrap().value
        };
        assert!((e.value - direct).abs() < 1e-10 * direct, "{} vs {direct}", e.value);
        let c = MeasureSpace::countable(WeightLaw::Constant { c: 1.0 }, 4).unwrap();
        let one = SimpleFunction::with_tail(vec![], TailLaw::constant(1.0));
        assert_eq!(luxemburg_norm(&c, &YoungFunction::ExpMinusOne, &one).unwrap().value, f64::INFINITY);
        assert_eq!(luxemburg_norm(&c, &YoungFunction::power_abs(2.0), &one).unwrap().value, f64::INFINITY);
    }

    #[test]
    fn dual_ball_examples() {
        let psi = YoungFunction::power_abs(2.0);
        let s = single(1.0);
        assert!(dual_ball_membership(&s, &psi, &SimpleFunction::zeros(1)).unwrap());
        assert!(dual_ball_membership(&s, &psi, &SimpleFunction::new(vec![1.0])).unwrap());
        assert!(!dual_ball_membership(&s, &psi, &SimpleFunction::new(vec![2.0])).unwrap());
    }

    #[test]
    fn pairing_examples() {
        let s = single(3.0);
        let chi = SimpleFunction::new(vec![1.0]);
        assert_eq!(holder_pairing(&s, &chi, &chi).unwrap(), 3.0);
        assert_eq!(holder_pairing(&s, &chi, &SimpleFunction::zeros(1)).unwrap(), 0.0);
    }

    #[test]
    fn truncations_converge_on_geometric_space() {
        let g = MeasureSpace::countable(WeightLaw::Geometric { a: 1.0, r: 0.5 }, 4).unwrap();
        let f = SimpleFunction::with_tail(vec![], TailLaw::monomial(Monomial::new(3.0, 0.0, 0.8)));
        let seq: Vec<SimpleFunction> = (1..=60).map(|n| f.extended(n).unwrap().truncated(n)).collect();
        let r = convergence_check(&g, &YoungFunction::power_abs(2.0), &seq, &f).unwrap();
        assert!(r.norm_converges && r.modular_converges && r.verdict.is_holds());
        let other = vec![SimpleFunction::zeros(1); 3];
        let r = convergence_check(&g, &YoungFunction::power_abs(2.0), &other, &f).unwrap();
        assert!(!r.norm_converges && r.verdict.is_holds());
    }
}
