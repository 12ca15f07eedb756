//! Composition operators `C_φ f = f∘φ` on Orlicz spaces: domains, density,
//! truncation approximants and the algebra of sums and composites.

mod bounded;

use serde::{Deserialize, Serialize};

pub use bounded::{
    boundedness_verdict, closedness_demo, operator_norm_estimate, BoundedStatus, BoundednessVerdict,
    ClosednessReport, SequenceBuilder,
};

use crate::error::{Error, Result};
use crate::measure::{h_finiteness, MeasureSpace, SimpleFunction, Transformation};
use crate::norms::{luxemburg_norm, modular};
use crate::tail::{Phase, TailLaw, TailSum};
use crate::verdict::{Decision, Verdict};
use crate::young::YoungFunction;

const LADDER: i32 = 60;
const SUBLEVEL_CAP: usize = 1 << 16;

pub fn compose_apply(space: &MeasureSpace, f: &SimpleFunction, phi: &Transformation) -> Result<SimpleFunction> {
    space.compose(f, phi)
}

/// Whether `g ∈ L^Φ(μ)`.
pub fn membership(space: &MeasureSpace, phi: &YoungFunction, g: &SimpleFunction) -> Result<Decision> {
    weighted_membership(space, phi, g, &[])
}

/// Whether `g ∈ L^Φ((1 + Σ hs) dμ)`: some rung `k = 2^{-j}` of the scale
/// ladder gives a finite modular. `No` only when every rung is certified
/// infinite.
pub fn weighted_membership(
    space: &MeasureSpace,
    phi: &YoungFunction,
    g: &SimpleFunction,
    hs: &[&SimpleFunction],
) -> Result<Decision> {
    if hs.iter().any(|h| h.values.iter().any(|v| v.is_nan()) || !h.tail().is_resolved()) {
        return Ok(Decision::Unknown);
    }
    let len = hs.iter().map(|h| h.len()).fold(g.len(), usize::max);
    let g = match g.extended(len) {
        Ok(g) => g,
        Err(Error::UnresolvedTail(_)) => return Ok(Decision::Unknown),
        Err(e) => return Err(e),
    };
    let hs = match hs.iter().map(|h| h.extended(len)).collect::<Result<Vec<_>>>() {
        Ok(hs) => hs,
        Err(Error::UnresolvedTail(_)) => return Ok(Decision::Unknown),
        Err(e) => return Err(e),
    };
    let mut unknown = false;
    for j in 0..=LADDER {
        let phik = g.scale(2f64.powi(-j)).apply_young(phi);
        let mut total = space.integral_abs(&phik)?;
        for h in &hs {
            total = total.add(space.integral_abs(&phik.mul(h)?)?);
        }
        match total {
            TailSum::Finite { hi, .. } if hi.is_finite() => return Ok(Decision::Yes),
            TailSum::Infinite => {}
            _ => unknown = true,
        }
    }
    Ok(if unknown { Decision::Unknown } else { Decision::No })
}

fn and(a: Decision, b: Decision) -> Decision {
    match (a, b) {
        (Decision::No, _) | (_, Decision::No) => Decision::No,
        (Decision::Yes, Decision::Yes) => Decision::Yes,
        _ => Decision::Unknown,
    }
}

/// `1 + Σ hs`, with a constant tail on countable spaces.
pub fn one_plus(space: &MeasureSpace, hs: &[&SimpleFunction]) -> Result<SimpleFunction> {
    let mut out = if space.is_countable() {
        SimpleFunction::with_tail(vec![1.0; space.len()], TailLaw::constant(1.0))
    } else {
        SimpleFunction::new(vec![1.0; space.len()])
    };
    for h in hs {
        out = out.add(h)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeOfVariableReport {
    /// `ρ_Φ(f∘φ)`.
    pub lhs: TailSum,
    /// `Σ Φ(|f|) h μ`.
    pub rhs: TailSum,
    pub verdict: Verdict,
}

pub fn change_of_variable_check(
    space: &MeasureSpace,
    phi: &YoungFunction,
    f: &SimpleFunction,
    map: &Transformation,
) -> Result<ChangeOfVariableReport> {
    let h = space.radon_nikodym(map)?;
    let lhs = modular(space, phi, &space.compose(f, map)?)?;
    let rhs = if h.values.iter().any(|v| v.is_nan()) {
        TailSum::Unresolved { partial: f64::NAN }
    } else {
        let n = f.len().max(h.len());
        match (f.extended(n), h.extended(n)) {
            (Ok(f), Ok(h)) => space.integral_abs(&f.apply_young(phi).mul(&h)?)?,
            _ => TailSum::Unresolved { partial: f64::NAN },
        }
    };
    let verdict = match (&lhs, &rhs) {
        (TailSum::Infinite, TailSum::Infinite) => Verdict::holds("both sides are +∞"),
        (TailSum::Finite { lo: a, hi: b }, TailSum::Finite { lo: c, hi: d }) => {
            let tol = 1e-12 * b.abs().max(d.abs()).max(1.0);
            if a - tol <= *d && c - tol <= *b {
                Verdict::holds(format!("ρ_Φ(f∘φ) ∈ [{a}, {b}], ∫Φ(|f|)h dμ ∈ [{c}, {d}]"))
            } else {
                Verdict::fails(format!("ρ_Φ(f∘φ) ∈ [{a}, {b}] but ∫Φ(|f|)h dμ ∈ [{c}, {d}]"), None)
            }
        }
        (TailSum::Unresolved { .. }, _) | (_, TailSum::Unresolved { .. }) => {
            Verdict::inconclusive("a side could not be summed in closed form")
        }
        (TailSum::Infinite, TailSum::Finite { hi, .. }) | (TailSum::Finite { hi, .. }, TailSum::Infinite)
            if hi.is_infinite() =>
        {
            Verdict::inconclusive("one side is +∞, the other only bracketed")
        }
        _ => Verdict::fails("one side is +∞, the other finite", None),
    };
    Ok(ChangeOfVariableReport { lhs, rhs, verdict })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainMembership {
    /// `f ∈ L^Φ(μ)` and `f∘φ ∈ L^Φ(μ)`.
    pub direct: Decision,
    /// `f ∈ L^Φ((1+h)dμ)`.
    pub weighted: Decision,
    pub member: Decision,
    pub agree: bool,
}

pub fn domain_membership(
    space: &MeasureSpace,
    phi: &YoungFunction,
    map: &Transformation,
    f: &SimpleFunction,
) -> Result<DomainMembership> {
    let base = membership(space, phi, f)?;
    let image = membership(space, phi, &space.compose(f, map)?)?;
    let direct = and(base, image);
    let weighted = weighted_membership(space, phi, f, &[&space.radon_nikodym(map)?])?;
    let member = if direct.is_decisive() { direct } else { weighted };
    Ok(DomainMembership { direct, weighted, member, agree: direct.agrees_with(weighted) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DensityStatus {
    DenselyDefined,
    NotDenselyDefined { witness: usize, label: String },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainVerdict {
    pub status: DensityStatus,
    /// `h < ∞` at every atom.
    pub h_facet: Verdict,
    /// `μ` restricted to `φ⁻¹(Σ)` is σ-finite.
    pub sigma_facet: Verdict,
    /// Density `1 + h` of `ν` with respect to `μ`.
    pub nu: SimpleFunction,
}

impl DomainVerdict {
    pub fn is_dense(&self) -> bool {
        self.status == DensityStatus::DenselyDefined
    }

    pub fn facets_agree(&self) -> bool {
        self.h_facet.agrees_with(&self.sigma_facet)
    }
}

pub fn density_verdict(space: &MeasureSpace, _phi: &YoungFunction, map: &Transformation) -> Result<DomainVerdict> {
    let h = space.radon_nikodym(map)?;
    let h_facet = h_finiteness(&h);
    let sigma_facet = space.sigma_finite_check(map)?;
    let status = match (&h_facet, &sigma_facet) {
        (Verdict::Fails { atom: Some(i), .. }, s) if !s.is_holds() => {
            DensityStatus::NotDenselyDefined { witness: *i, label: space.label(*i) }
        }
        (Verdict::Holds { .. }, Verdict::Holds { .. }) => DensityStatus::DenselyDefined,
        (a, b) if a.is_decisive() && b.is_decisive() => DensityStatus::Inconclusive {
            reason: format!("h-finiteness and σ-finiteness disagree: {a:?} vs {b:?}"),
        },
        (a, b) => DensityStatus::Inconclusive { reason: format!("undecided facets: {a:?}, {b:?}") },
    };
    let nu = one_plus(space, &[&h])?;
    Ok(DomainVerdict { status, h_facet, sigma_facet, nu })
}

/// `χ_{w < t}`, resolving the tail phase by phase.
pub fn sublevel_indicator(space: &MeasureSpace, w: &SimpleFunction, t: f64) -> Result<SimpleFunction> {
    let tail = w.tail();
    let mut len = w.len().max(space.len());
    if !space.is_countable() {
        return Ok(SimpleFunction::new(indicator_values(w, len, t)?));
    }
    let phases = match tail.as_ref() {
        TailLaw::Periodic { phases } => phases.clone(),
        TailLaw::Unresolved { reason } => return Err(Error::UnresolvedTail(reason.clone())),
    };
    let period = phases.len() as u64;
    loop {
        let mut mask = Vec::with_capacity(phases.len());
        for (j, ph) in phases.iter().enumerate() {
            let (j, start) = (j as u64, len as u64);
            let keep = match ph {
                Phase::Zero => Some(true),
                ph => {
                    let below = ph.upper().and_then(|m| m.sup_over(start, j, period)).is_some_and(|s| s < t);
                    let above = ph.lower().inf_over(start, j, period) >= t;
                    match (below, above) {
                        (true, _) => Some(true),
                        (_, true) => Some(false),
                        _ => None,
                    }
                }
            };
            mask.push(keep);
        }
        if mask.iter().all(Option::is_some) {
            let phases = mask
                .into_iter()
                .map(|k| if k == Some(true) { Phase::Exact(crate::tail::Monomial::constant(1.0)) } else { Phase::Zero })
                .collect();
            return Ok(SimpleFunction::with_tail(indicator_values(w, len, t)?, TailLaw::Periodic { phases }));
        }
        if len >= SUBLEVEL_CAP {
            return Err(Error::UnresolvedTail(format!("cannot resolve {{w < {t}}} on the tail")));
        }
        len *= 2;
    }
}

fn indicator_values(w: &SimpleFunction, len: usize, t: f64) -> Result<Vec<f64>> {
    (0..len)
        .map(|i| match w.at(i) {
            Some(v) if v.is_nan() => Err(Error::UnresolvedTail(format!("weight at atom index {i} is unresolved"))),
            Some(v) => Ok(if v < t { 1.0 } else { 0.0 }),
            None => Err(Error::UnresolvedTail(format!("weight at atom index {i} is only bracketed"))),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Approximant {
    pub n: usize,
    pub f_n: SimpleFunction,
    /// `N_Φ(f_N − f)`.
    #[serde(with = "crate::measure::ext_real::scalar")]
    pub distance: f64,
    pub in_domain: Decision,
    /// `N_Φ(C_φ f_N)`.
    #[serde(with = "crate::measure::ext_real::scalar")]
    pub image_norm: f64,
    /// `(N−1)·N_Φ(f)`.
    #[serde(with = "crate::measure::ext_real::scalar")]
    pub bound: f64,
    pub bound_holds: bool,
}

/// `f_N = f·χ_{C_N}` with `C_N = {h < N−1}`.
pub fn truncation_approximants(
    space: &MeasureSpace,
    phi: &YoungFunction,
    map: &Transformation,
    f: &SimpleFunction,
    n: usize,
) -> Result<Approximant> {
    if n < 2 {
        return Err(Error::Precondition("N must be at least 2".into()));
    }
    let dv = density_verdict(space, phi, map)?;
    if !dv.is_dense() {
        return Err(Error::Precondition(format!("C_φ is not densely defined: {:?}", dv.status)));
    }
    let h = space.radon_nikodym(map)?;
    approximant(space, phi, map, f, &h, n)
}

fn approximant(
    space: &MeasureSpace,
    phi: &YoungFunction,
    map: &Transformation,
    f: &SimpleFunction,
    h: &SimpleFunction,
    n: usize,
) -> Result<Approximant> {
    let chi = sublevel_indicator(space, h, (n - 1) as f64)?;
    let f_n = f.mul(&chi)?;
    let distance = luxemburg_norm(space, phi, &f_n.sub(f)?)?.value;
    let in_domain = domain_membership(space, phi, map, &f_n)?.member;
    let image_norm = luxemburg_norm(space, phi, &space.compose(&f_n, map)?)?.value;
    let bound = (n - 1) as f64 * luxemburg_norm(space, phi, f)?.value;
    let bound_holds = image_norm <= bound * (1.0 + 1e-9) + 1e-300;
    Ok(Approximant { n, f_n, distance, in_domain, image_norm, bound, bound_holds })
}

pub const CLOSURE_EPSILONS: [f64; 3] = [1e-2, 1e-4, 1e-6];
const CLOSURE_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureRow {
    pub function: usize,
    pub epsilon: f64,
    pub n: usize,
    #[serde(with = "crate::measure::ext_real::scalar")]
    pub distance: f64,
    pub achieved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub rows: Vec<ClosureRow>,
    pub verdict: Verdict,
}

/// For every `f` and `ε`, doubles `N` until the approximant from `L^Φ(ν)`
/// is within `ε` of `f`.
pub fn closure_identity_check(
    space: &MeasureSpace,
    phi: &YoungFunction,
    map: &Transformation,
    battery: &[SimpleFunction],
) -> Result<ClosureReport> {
    let h = space.radon_nikodym(map)?;
    let hf = h_finiteness(&h);
    if hf.is_fails() {
        return Err(Error::Precondition(format!("h is not finite: {hf:?}")));
    }
    let mut rows = Vec::new();
    for (idx, f) in battery.iter().enumerate() {
        let mut n = 2;
        for eps in CLOSURE_EPSILONS {
            let mut a = approximant(space, phi, map, f, &h, n)?;
            while a.distance > eps && n < CLOSURE_CAP {
                n *= 2;
                a = approximant(space, phi, map, f, &h, n)?;
            }
            rows.push(ClosureRow { function: idx, epsilon: eps, n, distance: a.distance, achieved: a.distance <= eps });
        }
    }
    let verdict = match rows.iter().find(|r| !r.achieved) {
        None => Verdict::holds("every function is approximated from L^Φ(ν) to every requested ε"),
        Some(r) => Verdict::inconclusive(format!(
            "function {} reached distance {} > ε = {} at the cap N = {}",
            r.function, r.distance, r.epsilon, r.n
        )),
    };
    Ok(ClosureReport { rows, verdict })
}

/// A small battery of functions in `L^Φ(μ)`: indicators, a flat prefix and,
/// on countable spaces, a geometrically decaying tail.
pub fn default_battery(space: &MeasureSpace) -> Vec<SimpleFunction> {
    let n = space.len();
    let mut out = vec![SimpleFunction::zeros(n)];
    if n > 0 {
        let mut chi = vec![0.0; n];
        chi[0] = 1.0;
        out.push(SimpleFunction::new(chi));
        out.push(SimpleFunction::new((0..n).map(|i| 1.0 / (i as f64 + 1.0)).collect()));
    }
    if space.is_countable() {
        let decay = crate::tail::Monomial::new(1.0, 0.0, 0.5);
        out.push(SimpleFunction::with_tail(vec![], TailLaw::monomial(decay)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseWeightedReport {
    pub verdict: Verdict,
    /// `N_Φ(f − f·χ_{g<n})` for `n = 2^j`, per sample.
    pub trails: Vec<Vec<f64>>,
}

/// `L^Φ(g dμ) ∩ L^Φ(μ)` is dense in `L^Φ(μ)` iff `g < ∞` at every atom.
pub fn dense_weighted_subspace_check(
    space: &MeasureSpace,
    phi: &YoungFunction,
    g: &SimpleFunction,
    samples: &[SimpleFunction],
) -> Result<DenseWeightedReport> {
    if g.values.iter().any(|v| *v < 0.0) {
        return Err(Error::InvalidFunction("weight must be nonnegative".into()));
    }
    let verdict = h_finiteness(g);
    if !verdict.is_holds() {
        return Ok(DenseWeightedReport { verdict, trails: vec![] });
    }
    let mut trails = Vec::with_capacity(samples.len());
    for f in samples {
        let mut trail = Vec::new();
        for j in 0..=20 {
            let chi = sublevel_indicator(space, g, 2f64.powi(j))?;
            let d = luxemburg_norm(space, phi, &f.mul(&chi)?.sub(f)?)?.value;
            trail.push(d);
            if d == 0.0 {
                break;
            }
        }
        trails.push(trail);
    }
    let converges = trails.iter().all(|t| t.last().is_some_and(|d| *d <= 1e-6));
    let verdict = if converges {
        Verdict::holds("g is finite at every atom; the truncations f·χ_{g<n} converge in norm")
    } else {
        Verdict::holds("g is finite at every atom; some truncation trail is still above 1e-6 at n = 2^20")
    };
    Ok(DenseWeightedReport { verdict, trails })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumDomainReport {
    /// `J = 1 + h₁ + h₂`.
    pub j: SimpleFunction,
    /// `f ∈ L^Φ(J dμ)`.
    pub weighted: Decision,
    /// `f ∈ L^Φ(μ)` and `(α₁C_φ + α₂C_ψ)|f| ∈ L^Φ(μ)`.
    pub direct: Decision,
    /// `(α₁C_φ + α₂C_ψ)f ∈ L^Φ(μ)`, cancellations included.
    pub signed: Decision,
    pub agree: bool,
}

pub fn sum_domain_check(
    space: &MeasureSpace,
    phi: &YoungFunction,
    alpha1: f64,
    map1: &Transformation,
    alpha2: f64,
    map2: &Transformation,
    f: &SimpleFunction,
) -> Result<SumDomainReport> {
    if alpha1 <= 0.0 || alpha2 <= 0.0 {
        return Err(Error::Precondition("coefficients must be positive".into()));
    }
    let h1 = space.radon_nikodym(map1)?;
    let h2 = space.radon_nikodym(map2)?;
    let j = one_plus(space, &[&h1, &h2])?;
    let weighted = weighted_membership(space, phi, f, &[&h1, &h2])?;
    let combo = |g: &SimpleFunction| -> Result<SimpleFunction> {
        space.compose(g, map1)?.scale(alpha1).add(&space.compose(g, map2)?.scale(alpha2))
    };
    let direct = and(membership(space, phi, f)?, membership(space, phi, &combo(&f.abs())?)?);
    let signed = membership(space, phi, &combo(f)?)?;
    Ok(SumDomainReport { j, weighted, direct, signed, agree: weighted.agrees_with(direct) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeDomainReport {
    /// `f`, `f∘ψ` and `f∘ψ∘φ` all in `L^Φ(μ)`.
    pub direct: Decision,
    /// `f ∈ L^Φ((1 + h_ψ + h_{ψ∘φ}) dμ)`.
    pub corrected: Decision,
    /// `f ∈ L^Φ(J₀ dμ)` with `J₀ = 1 + h₂ + h₁∘ψ⁻¹`, bijective `ψ` only.
    pub j0: Option<Decision>,
    pub notice: Option<String>,
    pub agree: bool,
}

/// Domain of `C_φ C_ψ f = f∘ψ∘φ`.
pub fn composite_domain_check(
    space: &MeasureSpace,
    phi: &YoungFunction,
    map1: &Transformation,
    map2: &Transformation,
    f: &SimpleFunction,
) -> Result<CompositeDomainReport> {
    let composite = map1.then(map2, space)?;
    let f_psi = space.compose(f, map2)?;
    let direct = and(
        and(membership(space, phi, f)?, membership(space, phi, &f_psi)?),
        membership(space, phi, &space.compose(f, &composite)?)?,
    );
    let h2 = space.radon_nikodym(map2)?;
    let hc = space.radon_nikodym(&composite)?;
    let corrected = weighted_membership(space, phi, f, &[&h2, &hc])?;
    let (j0, notice) = if map2.is_bijective(space) {
        let h1 = space.radon_nikodym(map1)?;
        let h1_back = space.compose(&h1, &space.inverse_map(map2)?)?;
        (Some(weighted_membership(space, phi, f, &[&h2, &h1_back])?), None)
    } else {
        (None, Some("ψ is not bijective: the J₀ facet is skipped".to_string()))
    };
    let mut agree = direct.agrees_with(corrected);
    let mut notice = notice;
    if let Some(p) = j0 {
        if !p.agrees_with(direct) {
            agree = false;
            notice = Some(format!("J₀ facet ({p:?}) disagrees with the direct membership ({direct:?})"));
        }
    }
    Ok(CompositeDomainReport { direct, corrected, j0, notice, agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{MapLaw, WeightLaw};
    use crate::tail::Monomial;

    fn three() -> (MeasureSpace, Transformation) {
        (MeasureSpace::uniform(3), Transformation::explicit(vec![0, 0, 2]))
    }

    fn geometric() -> MeasureSpace {
        MeasureSpace::countable(WeightLaw::Geometric { a: 1.0, r: 0.5 }, 8).unwrap()
    }

    fn flat() -> MeasureSpace {
        MeasureSpace::countable(WeightLaw::Constant { c: 1.0 }, 8).unwrap()
    }

    fn collapse() -> Transformation {
        Transformation::from_law(MapLaw::Constant { m: 1 })
    }

    #[test]
    fn compose_examples() {
        let (s, phi) = three();
        let f = SimpleFunction::new(vec![5.0, 6.0, 7.0]);
        assert_eq!(compose_apply(&s, &f, &phi).unwrap().values, vec![5.0, 5.0, 7.0]);
        assert_eq!(compose_apply(&s, &f, &Transformation::identity(&s)).unwrap(), f);
    }

    #[test]
    fn change_of_variables_on_three_atoms() {
        let (s, phi) = three();
        let f = SimpleFunction::new(vec![1.0, 2.0, 3.0]);
        let r = change_of_variable_check(&s, &YoungFunction::power_abs(2.0), &f, &phi).unwrap();
        assert_eq!(r.lhs, TailSum::exact(11.0));
        assert_eq!(r.rhs, TailSum::exact(11.0));
        assert!(r.verdict.is_holds());
        let g = geometric();
        let f = SimpleFunction::with_tail(vec![], TailLaw::monomial(Monomial::new(1.0, 0.0, 0.9)));
        let r = change_of_variable_check(&g, &YoungFunction::ExpMinusOne, &f, &Transformation::from_law(MapLaw::Shift { k: 2 })).unwrap();
        assert!(r.verdict.is_holds(), "{r:?}");
    }

    #[test]
    fn membership_examples() {
        let phi = YoungFunction::power_abs(2.0);
        let (s, m) = three();
        assert_eq!(domain_membership(&s, &phi, &m, &SimpleFunction::new(vec![1.0, 2.0, 3.0])).unwrap().member, Decision::Yes);
        let chi = SimpleFunction::new(vec![1.0]);
        let d = domain_membership(&flat(), &phi, &collapse(), &chi).unwrap();
        assert_eq!((d.direct, d.weighted), (Decision::No, Decision::No));
        let d = domain_membership(&flat(), &phi, &collapse(), &SimpleFunction::zeros(1)).unwrap();
        assert_eq!(d.member, Decision::Yes);
    }

    #[test]
    fn density_examples() {
        let phi = YoungFunction::power_abs(2.0);
        let (s, m) = three();
        assert!(density_verdict(&s, &phi, &m).unwrap().is_dense());
        let v = density_verdict(&geometric(), &phi, &collapse()).unwrap();
        assert!(v.is_dense() && v.facets_agree());
        assert_eq!(v.nu.values[0], 3.0);
        let v = density_verdict(&flat(), &phi, &collapse()).unwrap();
        assert_eq!(v.status, DensityStatus::NotDenselyDefined { witness: 0, label: "1".into() });
        assert!(v.facets_agree());
    }

    #[test]
    fn approximant_examples() {
        let phi = YoungFunction::power_abs(2.0);
        let (s, m) = three();
        let f = SimpleFunction::new(vec![1.0, 2.0, 3.0]);
        let a = truncation_approximants(&s, &phi, &m, &f, 2).unwrap();
        assert_eq!(a.f_n.values, vec![0.0, 2.0, 0.0]);
        assert!(a.bound_holds);
        let id = Transformation::identity(&s);
        let a = truncation_approximants(&s, &phi, &id, &f, 3).unwrap();
        assert_eq!((a.f_n.clone(), a.distance), (f.clone(), 0.0));
        assert!(truncation_approximants(&flat(), &phi, &collapse(), &f, 3).is_err());
    }

    #[test]
    fn approximants_converge_on_a_growing_weight() {
        let g = geometric();
        let m = Transformation::from_law(MapLaw::Multiply { k: 2 });
        let f = SimpleFunction::with_tail(vec![], TailLaw::monomial(Monomial::new(1.0, 0.0, 0.9)));
        let phi = YoungFunction::power_abs(2.0);
        let mut last = f64::INFINITY;
        for n in [2, 4, 8, 16, 64, 256, 1 << 12] {
            let a = truncation_approximants(&g, &phi, &m, &f, n).unwrap();
            assert!(a.distance <= last * (1.0 + 1e-12), "N={n}");
            assert!(a.bound_holds);
            assert_eq!(a.in_domain, Decision::Yes);
            last = a.distance;
        }
        assert!(last < 1e-3, "{last}");
    }

    #[test]
    fn closure_examples() {
        let phi = YoungFunction::power_abs(2.0);
        let (s, m) = three();
        let r = closure_identity_check(&s, &phi, &m, &default_battery(&s)).unwrap();
        assert!(r.verdict.is_holds());
        let g = geometric();
        let r = closure_identity_check(&g, &phi, &collapse(), &default_battery(&g)).unwrap();
        assert!(r.verdict.is_holds());
        assert!(r.rows.iter().all(|row| row.distance <= row.epsilon));
        let r = closure_identity_check(&g, &phi, &Transformation::from_law(MapLaw::Multiply { k: 2 }), &default_battery(&g)).unwrap();
        assert!(r.verdict.is_holds(), "{r:?}");
    }

    #[test]
    fn weighted_subspace_examples() {
        let phi = YoungFunction::power_abs(2.0);
        let s = MeasureSpace::uniform(2);
        let ones = SimpleFunction::new(vec![1.0, 1.0]);
        assert!(dense_weighted_subspace_check(&s, &phi, &ones, std::slice::from_ref(&ones)).unwrap().verdict.is_holds());
        let inf = SimpleFunction::new(vec![1.0, f64::INFINITY]);
        let v = dense_weighted_subspace_check(&s, &phi, &inf, &[]).unwrap().verdict;
        assert!(matches!(v, Verdict::Fails { atom: Some(1), .. }));
        let g = geometric();
        let n = SimpleFunction::with_tail(vec![], TailLaw::monomial(Monomial::new(1.0, 1.0, 1.0)));
        let r = dense_weighted_subspace_check(&g, &phi, &n, &default_battery(&g)).unwrap();
        assert!(r.verdict.is_holds());
        assert!(r.trails.iter().all(|t| t.last().unwrap() <= &1e-6));
    }

    #[test]
    fn sum_domain_examples() {
        let phi = YoungFunction::power_abs(2.0);
        let (s, m) = three();
        let f = SimpleFunction::new(vec![1.0, -2.0, 3.0]);
        let id = Transformation::identity(&s);
        let r = sum_domain_check(&s, &phi, 1.0, &id, 2.0, &id, &f).unwrap();
        assert_eq!(r.j.values, vec![3.0; 3]);
        assert!(r.agree && r.direct == Decision::Yes);
        let r = sum_domain_check(&s, &phi, 1.0, &m, 1.0, &id, &f).unwrap();
        assert_eq!((r.direct, r.weighted), (Decision::Yes, Decision::Yes));
        let c = flat();
        let r = sum_domain_check(&c, &phi, 1.0, &collapse(), 1.0, &Transformation::identity(&c), &SimpleFunction::new(vec![1.0])).unwrap();
        assert_eq!((r.direct, r.weighted), (Decision::No, Decision::No));
    }

    #[test]
    fn composite_domain_examples() {
        let phi = YoungFunction::power_abs(2.0);
        let (s, m) = three();
        let perm = Transformation::explicit(vec![2, 0, 1]);
        let f = SimpleFunction::new(vec![1.0, 2.0, 3.0]);
        let r = composite_domain_check(&s, &phi, &m, &perm, &f).unwrap();
        assert!(r.agree && r.j0 == Some(Decision::Yes));
        let r = composite_domain_check(&s, &phi, &m, &m, &SimpleFunction::zeros(3)).unwrap();
        assert!(r.j0.is_none() && r.direct == Decision::Yes);
        let c = flat();
        let r = composite_domain_check(&c, &phi, &collapse(), &Transformation::identity(&c), &SimpleFunction::new(vec![1.0])).unwrap();
        assert_eq!(r.direct, Decision::No);
        assert_eq!(r.j0, Some(Decision::No));
    }
}
