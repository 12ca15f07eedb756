//! The `L^p` case: `‖C_φ f‖_p = ‖M_{h^{1/p}} f‖_p` and weighted composition
//! operators `u·C_φ` from `L^p` to `L^q`.

use serde::{Deserialize, Serialize};

use crate::compop::{density_verdict, weighted_membership, DensityStatus, DomainVerdict};
use crate::error::{Error, Result};
use crate::measure::{MapLaw, MeasureSpace, SimpleFunction, Transformation};
use crate::tail::{TailLaw, TailSum};
use crate::verdict::{Decision, Verdict};
use crate::young::YoungFunction;

/// `(Σ |f|^p μ)^{1/p}`; the upper end when the tail is only bracketed.
pub fn lp_norm(space: &MeasureSpace, f: &SimpleFunction, p: f64) -> Result<f64> {
    Ok(lp_power(space, f, p)?.powf(1.0 / p))
}

fn lp_power(space: &MeasureSpace, f: &SimpleFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    match space.integral_abs(&f.abs_pow(p))? {
        TailSum::Finite { hi, .. } => Ok(hi),
        TailSum::Infinite => Ok(f64::INFINITY),
        TailSum::Unresolved { partial } => {
            Err(Error::UnresolvedTail(format!("Σ|f|^p μ unresolved (partial sum {partial})")))
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("exponent must be a finite p ≥ 1, got {p}")))
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicationReport {
    /// `‖C_φ f‖_p`.
    #[serde(with = "crate::measure::ext_real::scalar")]
    pub composition: f64,
    /// `‖h^{1/p} f‖_p`.
    #[serde(with = "crate::measure::ext_real::scalar")]
    pub multiplication: f64,
    /// `∫ |f|^p (1+h) dμ`.
    #[serde(with = "crate::measure::ext_real::scalar")]
    pub weighted: f64,
    /// `‖f‖_p^p + ‖C_φ f‖_p^p`.
    #[serde(with = "crate::measure::ext_real::scalar")]
    pub split: f64,
    /// `f ∈ L^p((1+h)dμ)` against `f, C_φ f ∈ L^p(μ)`.
    pub weighted_member: Decision,
    pub direct_member: Decision,
    pub verdict: Verdict,
}

pub fn multiplication_equivalence_check(
    space: &MeasureSpace,
    f: &SimpleFunction,
    map: &Transformation,
    p: f64,
) -> Result<MultiplicationReport> {
    check_p(p)?;
    let h = space.radon_nikodym(map)?;
    if h.values.iter().any(|v| v.is_nan()) || !h.tail().is_resolved() {
        return Err(Error::UnresolvedTail("h is not resolved".into()));
    }
    let n = f.len().max(h.len());
    let (fe, he) = (f.extended(n)?, h.extended(n)?);
    let cf = space.compose(f, map)?;
    let composition = lp_norm(space, &cf, p)?;
    let multiplication = lp_norm(space, &fe.mul(&he.abs_pow(1.0 / p))?, p)?;
    let fp = lp_power(space, f, p)?;
    let cfp = lp_power(space, &cf, p)?;
    let split = fp + cfp;
    let weighted = fp + lp_power(space, &fe.abs_pow(p).mul(&he)?.abs_pow(1.0 / p), p)?;
    let phi = YoungFunction::power_abs(p);
    let weighted_member = weighted_membership(space, &phi, f, &[&h])?;
    let direct_member = Decision::from_bool(fp.is_finite() && cfp.is_finite());
    let tol = if space.is_countable() { 1e-9 } else { 1e-12 };
    let verdict = if !close(composition, multiplication, tol) {
        Verdict::fails(format!("‖C_φ f‖_p = {composition} but ‖h^(1/p) f‖_p = {multiplication}"), None)
    } else if !close(weighted, split, tol) {
        Verdict::fails(format!("∫|f|^p(1+h)dμ = {weighted} but ‖f‖_p^p + ‖C_φ f‖_p^p = {split}"), None)
    } else if !weighted_member.agrees_with(direct_member) {
        Verdict::fails("L^p((1+h)dμ) membership disagrees with the domain of C_φ", None)
    } else {
        Verdict::holds(format!("‖C_φ f‖_p = ‖h^(1/p) f‖_p = {composition}"))
    };
    Ok(MultiplicationReport { composition, multiplication, weighted, split, weighted_member, direct_member, verdict })
}

/// `w(x)μ(x) < ∞` at every atom: σ-finiteness of `μ_w` on an atomic space.
fn atom_mass_facet(space: &MeasureSpace, w: &SimpleFunction) -> Verdict {
    for (i, v) in w.values.iter().enumerate() {
        let m = crate::mul0(*v, space.weight(i));
        if m.is_nan() {
            return Verdict::inconclusive(format!("weight unresolved at atom {}", space.label(i)));
        }
        if m.is_infinite() {
            return Verdict::fails(format!("the atom {} has infinite weighted measure", space.label(i)), Some(i));
        }
    }
    match w.tail().as_ref() {
        TailLaw::Unresolved { reason } => Verdict::inconclusive(reason.clone()),
        _ => Verdict::holds("every atom has finite weighted measure and the atoms are countably many"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpDomainVerdict {
    pub verdict: DomainVerdict,
    /// `μ_w` is σ-finite.
    pub measure_facet: Verdict,
}

fn merge(mut verdict: DomainVerdict, measure_facet: Verdict) -> LpDomainVerdict {
    let facets = [&verdict.h_facet, &verdict.sigma_facet, &measure_facet];
    let decisive: Vec<_> = facets.iter().filter(|v| v.is_decisive()).collect();
    if decisive.windows(2).any(|w| !w[0].agrees_with(w[1])) {
        verdict.status = DensityStatus::Inconclusive { reason: "decisive facets disagree".into() };
    }
    LpDomainVerdict { verdict, measure_facet }
}

pub fn lp_density_verdict(space: &MeasureSpace, map: &Transformation, p: f64) -> Result<LpDomainVerdict> {
    check_p(p)?;
    let base = density_verdict(space, &YoungFunction::power_abs(p), map)?;
    let facet = atom_mass_facet(space, &space.radon_nikodym(map)?);
    Ok(merge(base, facet))
}

/// `u·C_φ : L^p(μ) → L^q(μ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedCompositionSpec {
    pub u: SimpleFunction,
    pub map: Transformation,
    pub p: f64,
    pub q: f64,
}

/// `J_φ = h·E^{φ⁻¹(Σ)}(|u|^q)∘φ⁻¹`, fiber by fiber (0 on empty fibers).
pub fn weighted_comp_index(space: &MeasureSpace, spec: &WeightedCompositionSpec) -> Result<SimpleFunction> {
    check_p(spec.p)?;
    check_p(spec.q)?;
    let h = space.radon_nikodym(&spec.map)?;
    let uq = spec.u.abs_pow(spec.q);
    if !space.is_countable() {
        let part = space.fiber_partition(&spec.map)?;
        let e = space.conditional_expectation(&uq, &part)?;
        let mut j = vec![0.0; space.len()];
        for block in &part.blocks {
            let y = spec.map.target(block[0]);
            j[y] = crate::mul0(h.values[y], e.values[block[0]]);
        }
        return Ok(SimpleFunction::new(j));
    }
    let tail = spec.u.tail();
    let c = if tail.is_zero() {
        0.0
    } else if is_constant(&tail) {
        tail.eval(1).unwrap_or(0.0).abs().powf(spec.q)
    } else if spec.map.law() == MapLaw::Identity && spec.map.targets.iter().enumerate().all(|(i, t)| i == *t) {
        return h.mul(&uq);
    } else {
        return unresolved_index(&h, "J_φ has no closed form for a non-constant tail of u");
    };
    // J = |c|^q·h plus the prefix deviations of |u|^q from the constant tail
    let reach = (0..uq.len()).map(|x| spec.map.target(x) + 1).max().unwrap_or(0);
    let mut j = h.scale(c).extended(h.len().max(reach))?;
    for x in 0..uq.len() {
        let y = spec.map.target(x);
        j.values[y] += (uq.values[x] - c) * space.weight(x) / space.weight(y);
    }
    Ok(j)
}

fn is_constant(t: &TailLaw) -> bool {
    matches!(t, TailLaw::Periodic { phases } if phases.len() == 1
        && matches!(phases[0], crate::tail::Phase::Exact(m) if m.alpha == 0.0 && m.rho == 1.0))
}

fn unresolved_index(h: &SimpleFunction, reason: &str) -> Result<SimpleFunction> {
    Ok(SimpleFunction::with_tail(vec![f64::NAN; h.len()], TailLaw::unresolved(reason)))
}

/// `‖u·(f∘φ)‖_q^q` against `Σ J_φ |f|^q μ`.
pub fn weighted_norm_identity(
    space: &MeasureSpace,
    spec: &WeightedCompositionSpec,
    f: &SimpleFunction,
) -> Result<(f64, f64)> {
    let j = weighted_comp_index(space, spec)?;
    let lhs = lp_power(space, &spec.u.mul(&space.compose(f, &spec.map)?)?, spec.q)?;
    let n = f.len().max(j.len());
    let rhs = match space.integral_abs(&f.extended(n)?.abs_pow(spec.q).mul(&j.extended(n)?)?)? {
        TailSum::Finite { hi, .. } => hi,
        TailSum::Infinite => f64::INFINITY,
        TailSum::Unresolved { .. } => return Err(Error::UnresolvedTail("Σ J|f|^q μ".into())),
    };
    Ok((lhs, rhs))
}

pub fn weighted_density_verdict(space: &MeasureSpace, spec: &WeightedCompositionSpec) -> Result<LpDomainVerdict> {
    let j = weighted_comp_index(space, spec)?;
    let h_facet = crate::measure::h_finiteness(&j);
    let measure_facet = atom_mass_facet(space, &j);
    let status = match &h_facet {
        Verdict::Holds { .. } => DensityStatus::DenselyDefined,
        Verdict::Fails { atom: Some(i), .. } => DensityStatus::NotDenselyDefined { witness: *i, label: space.label(*i) },
        v => DensityStatus::Inconclusive { reason: format!("{v:?}") },
    };
    let nu = crate::compop::one_plus(space, &[&j])?;
    let base = DomainVerdict { status, sigma_facet: measure_facet.clone(), h_facet, nu };
    Ok(merge(base, measure_facet))
}
