//! The adjoint `C*_φ = M_h C_{φ⁻¹} E^φ` and its density index
//! `J = 1 + E^φ(h₋₁)·Ψ(h)∘φ`.

use serde::{Deserialize, Serialize};

use crate::compop::{density_verdict, weighted_membership};
use crate::error::{Error, Result};
use crate::measure::{h_finiteness, MapLaw, MeasureSpace, SimpleFunction, Transformation};
use crate::norms::{holder_pairing, modular};
use crate::tail::TailSum;
use crate::verdict::{Decision, Verdict};
use crate::young::{delta2_probe, delta_prime_probe, GrowthVerdict, ProbeRange, YoungFunction};

fn require_delta2(phi: &YoungFunction) -> Result<GrowthVerdict> {
    let v = delta2_probe(phi, ProbeRange::default())?;
    if v.violated() {
        return Err(Error::Precondition(format!("{} is not in Δ₂: {:?}", phi.label(), v.status)));
    }
    Ok(v)
}

/// `(C*_φ g)(y) = h(y)·E^φ(g)` on the fiber `φ⁻¹({y})`, 0 on empty fibers.
pub fn adjoint_apply(
    space: &MeasureSpace,
    phi: &YoungFunction,
    map: &Transformation,
    g: &SimpleFunction,
) -> Result<SimpleFunction> {
    require_delta2(phi)?;
    let dv = density_verdict(space, phi, map)?;
    if !dv.is_dense() {
        return Err(Error::Precondition(format!("C_φ is not densely defined: {:?}", dv.status)));
    }
    adjoint_values(space, map, g)
}

fn adjoint_values(space: &MeasureSpace, map: &Transformation, g: &SimpleFunction) -> Result<SimpleFunction> {
    let h = space.radon_nikodym(map)?;
    if !space.is_countable() {
        let part = space.fiber_partition(map)?;
        let e = space.conditional_expectation(g, &part)?;
        let mut out = vec![0.0; space.len()];
        for block in &part.blocks {
            let y = map.target(block[0]);
            out[y] = crate::mul0(h.values[y], e.values[block[0]]);
        }
        return Ok(SimpleFunction::new(out));
    }
    if map.is_bijective(space) {
        return bijective_adjoint(space, map, g);
    }
    if !g.has_tail() {
        // finitely supported g: fiber sums Σ_{φ(x)=y} g(x)μ(x)/μ(y)
        let reach = (0..g.len()).map(|x| map.target(x) + 1).max().unwrap_or(0);
        let mut out = vec![0.0; reach.max(space.len())];
        for (x, v) in g.values.iter().enumerate() {
            let y = map.target(x);
            out[y] += crate::mul0(*v, space.weight(x)) / space.weight(y);
        }
        return Ok(SimpleFunction::new(out));
    }
    if let MapLaw::Constant { m } = map.law() {
        let lt = map.targets.len().max(g.len());
        let target = m as usize - 1;
        let mut out = vec![0.0; lt.max(target + 1).max(space.len())];
        let g = g.extended(lt)?;
        for x in 0..lt {
            let y = map.target(x);
            out[y] += crate::mul0(g.values[x], space.weight(x)) / space.weight(y);
        }
        let mut rest = g.clone();
        rest.values.iter_mut().for_each(|v| *v = 0.0);
        out[target] += space.integral(&rest)? / space.weight(target);
        return Ok(SimpleFunction::new(out));
    }
    Err(Error::UnresolvedTail(format!(
        "no closed form for C*_φ g with a tail under {:?}",
        map.law()
    )))
}

/// `h·(g∘φ⁻¹)`.
fn bijective_adjoint(space: &MeasureSpace, map: &Transformation, g: &SimpleFunction) -> Result<SimpleFunction> {
    let h = space.radon_nikodym(map)?;
    let back = space.compose(g, &space.inverse_map(map)?)?;
    let n = back.len().max(h.len());
    back.extended(n)?.mul(&h.extended(n)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjointReport {
    pub adjoint: SimpleFunction,
    /// `⟨C_φ f, g⟩`.
    #[serde(with = "crate::measure::ext_real::scalar")]
    pub lhs: f64,
    /// `⟨f, C*_φ g⟩`.
    #[serde(with = "crate::measure::ext_real::scalar")]
    pub rhs: f64,
    /// `|lhs − rhs|` relative to `max(1, ∫|f∘φ||g| dμ)`.
    #[serde(with = "crate::measure::ext_real::scalar")]
    pub residual: f64,
    pub density_index: Option<SimpleFunction>,
    pub density_verdict: Option<Verdict>,
}

pub fn duality_pairing_check(
    space: &MeasureSpace,
    phi: &YoungFunction,
    map: &Transformation,
    f: &SimpleFunction,
    g: &SimpleFunction,
) -> Result<AdjointReport> {
    let adjoint = adjoint_apply(space, phi, map, g)?;
    let cf = space.compose(f, map)?;
    let lhs = holder_pairing(space, &cf, g)?;
    let rhs = holder_pairing(space, f, &adjoint)?;
    let scale = match space.integral_abs(&cf.mul(g)?)? {
        TailSum::Finite { hi, .. } => hi.max(1.0),
        _ => 1.0,
    };
    let residual = (lhs - rhs).abs() / scale;
    let (density_index, density_verdict) = if map.is_bijective(space) {
        match adjoint_density_index(space, phi, map) {
            Ok(d) => (Some(d.j), Some(d.verdict)),
            Err(Error::Precondition(reason)) => (None, Some(Verdict::inconclusive(reason))),
            Err(e) => return Err(e),
        }
    } else {
        (None, None)
    };
    Ok(AdjointReport { adjoint, lhs, rhs, residual, density_index, density_verdict })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentRow {
    /// `g ∈ L^Ψ(J dμ)`.
    pub in_weighted: Decision,
    /// `C*_φ g ∈ L^Ψ(μ)`.
    pub image_member: Decision,
    /// `ρ_Ψ(C*_φ g)`.
    #[serde(with = "crate::measure::ext_real::scalar")]
    pub lhs: f64,
    /// `d·∫ Ψ(g)·h₋₁·Ψ(h)∘φ dμ`.
    #[serde(with = "crate::measure::ext_real::scalar")]
    pub rhs: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityIndex {
    pub j: SimpleFunction,
    pub verdict: Verdict,
    pub delta_prime: GrowthVerdict,
    pub containment: Vec<ContainmentRow>,
}

/// `J = 1 + h₋₁·Ψ(h)∘φ` for bijective `φ`; `C*_φ` is densely defined when
/// `J < ∞`. Samples `g` check `L^Ψ(J dμ) ⊆ 𝒟(C*_φ)` through the inequality
/// `ρ_Ψ(C*_φ g) ≤ d·∫ Ψ(g) h₋₁ Ψ(h)∘φ dμ`.
pub fn adjoint_density_index(space: &MeasureSpace, phi: &YoungFunction, map: &Transformation) -> Result<DensityIndex> {
    adjoint_density_index_with(space, phi, map, &sample_duals(space))
}

pub fn adjoint_density_index_with(
    space: &MeasureSpace,
    phi: &YoungFunction,
    map: &Transformation,
    samples: &[SimpleFunction],
) -> Result<DensityIndex> {
    require_delta2(phi)?;
    let psi = phi.conjugate();
    let delta_prime = delta_prime_probe(&psi, ProbeRange::pairs())?;
    if !delta_prime.holds() {
        return Err(Error::Precondition(format!("Ψ = {} is not certified in Δ′: {:?}", psi.label(), delta_prime.status)));
    }
    if !map.is_bijective(space) {
        return Err(Error::Precondition("the density index needs a bijective φ".into()));
    }
    let h = space.radon_nikodym(map)?;
    let h_inv = space.inverse_rn(map)?;
    let psi_h = space.compose(&h.apply_young(&psi), map)?;
    let n = psi_h.len().max(h_inv.len());
    let weight = h_inv.extended(n)?.mul(&psi_h.extended(n)?)?;
    let j = crate::compop::one_plus(space, &[&weight])?;
    let verdict = match h_finiteness(&j) {
        Verdict::Holds { .. } => Verdict::holds("J is finite at every atom, so C*_φ is densely defined"),
        other => other,
    };
    let d = delta_prime.constant().unwrap_or(f64::INFINITY);
    let x0 = delta_prime.x0().unwrap_or(f64::INFINITY);
    let containment = samples
        .iter()
        .map(|g| containment_row(space, &psi, map, g, &h, &weight, d, x0))
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityIndex { j, verdict, delta_prime, containment })
}

#[allow(clippy::too_many_arguments)]
fn containment_row(
    space: &MeasureSpace,
    psi: &YoungFunction,
    map: &Transformation,
    g: &SimpleFunction,
    h: &SimpleFunction,
    weight: &SimpleFunction,
    d: f64,
    x0: f64,
) -> Result<ContainmentRow> {
    let in_weighted = weighted_membership(space, psi, g, &[weight])?;
    let image = bijective_adjoint(space, map, g)?;
    let image_member = crate::compop::membership(space, psi, &image)?;
    let lhs = modular(space, psi, &image)?.upper().unwrap_or(f64::INFINITY);
    let n = g.len().max(weight.len());
    let rhs = match space.integral_abs(&g.extended(n)?.apply_young(psi).mul(&weight.extended(n)?)?)? {
        TailSum::Finite { hi, .. } => d * hi,
        _ => f64::INFINITY,
    };
    // Δ′ is only certified for arguments ≥ x0
    let below = |f: &SimpleFunction| f.values.iter().any(|v| *v != 0.0 && v.abs() < x0);
    let verdict = if x0 > 0.0 && (below(g) || below(h)) {
        Verdict::inconclusive(format!("some argument lies below the Δ′ threshold {x0}"))
    } else if in_weighted == Decision::Yes && image_member == Decision::No {
        Verdict::fails("g ∈ L^Ψ(J dμ) but C*_φ g ∉ L^Ψ(μ)", None)
    } else if lhs <= rhs * (1.0 + 1e-9) + 1e-300 {
        Verdict::holds(format!("ρ_Ψ(C*_φ g) = {lhs} ≤ {rhs}"))
    } else {
        Verdict::fails(format!("ρ_Ψ(C*_φ g) = {lhs} exceeds d·∫Ψ(g)h₋₁Ψ(h)∘φ dμ = {rhs}"), None)
    };
    Ok(ContainmentRow { in_weighted, image_member, lhs, rhs, verdict })
}

fn sample_duals(space: &MeasureSpace) -> Vec<SimpleFunction> {
    let n = space.len();
    let mut out = vec![SimpleFunction::new(vec![1.0; n])];
    if n > 0 {
        out.push(SimpleFunction::new((0..n).map(|i| 1.0 + (i % 3) as f64).collect()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::WeightLaw;

    fn three() -> (MeasureSpace, Transformation) {
        (MeasureSpace::uniform(3), Transformation::explicit(vec![0, 0, 2]))
    }

    #[test]
    fn adjoint_examples() {
        let phi = YoungFunction::power_abs(2.0);
        let (s, m) = three();
        let g = SimpleFunction::new(vec![4.0, 0.0, 7.0]);
        assert_eq!(adjoint_apply(&s, &phi, &m, &g).unwrap().values, vec![4.0, 0.0, 7.0]);
        assert_eq!(adjoint_apply(&s, &phi, &Transformation::identity(&s), &g).unwrap(), g);
        assert!(adjoint_apply(&s, &phi, &m, &SimpleFunction::zeros(3)).unwrap().is_zero());
        assert!(adjoint_apply(&s, &YoungFunction::ExpMinusOne, &m, &g).is_err());
    }

    #[test]
    fn pairing_example() {
        let phi = YoungFunction::power_abs(2.0);
        let (s, m) = three();
        let r = duality_pairing_check(&s, &phi, &m, &SimpleFunction::new(vec![1.0, 2.0, 3.0]), &SimpleFunction::new(vec![4.0, 0.0, 7.0])).unwrap();
        assert_eq!((r.lhs, r.rhs, r.residual), (25.0, 25.0, 0.0));
        assert!(r.density_index.is_none());
    }

    #[test]
    fn bijective_reduction_and_index() {
        let phi = YoungFunction::power_abs(2.0);
        let s = MeasureSpace::finite_numbered(vec![1.0, 2.0, 0.5]).unwrap();
        let perm = Transformation::explicit(vec![2, 0, 1]);
        let g = SimpleFunction::new(vec![1.0, -2.0, 3.0]);
        let a = adjoint_apply(&s, &phi, &perm, &g).unwrap();
        let b = bijective_adjoint(&s, &perm, &g).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-15);
        }
        let d = adjoint_density_index(&s, &phi, &perm).unwrap();
        assert!(d.verdict.is_holds());
        assert!(d.containment.iter().all(|r| r.verdict.is_decisive() && r.verdict.is_holds()));
        let id = Transformation::identity(&s);
        let d = adjoint_density_index(&s, &phi, &id).unwrap();
        // Ψ(1) = (p−1)(1/p)^{p/(p−1)} = 1/4 for p = 2
        assert!(d.j.values.iter().all(|v| (v - 1.25).abs() < 1e-15));
    }

    #[test]
    fn pair_swap_on_geometric_space() {
        let phi = YoungFunction::power_abs(2.0);
        let g = MeasureSpace::countable(WeightLaw::Geometric { a: 1.0, r: 0.5 }, 6).unwrap();
        let swap = Transformation::from_law(MapLaw::PairSwap);
        let d = adjoint_density_index(&g, &phi, &swap).unwrap();
        assert!(d.verdict.is_holds());
        // h alternates 2, 1/2, so J = 1 + h₋₁·h(φ)²/4 alternates 1 + 1/2·4/4 and 1 + 2·(1/4)/4
        assert!((d.j.at(0).unwrap() - 1.5).abs() < 1e-12);
        assert!((d.j.at(1).unwrap() - 1.125).abs() < 1e-12);
        assert!((d.j.at(40).unwrap() - 1.5).abs() < 1e-12);
        let f = SimpleFunction::new(vec![1.0, 2.0, 0.0, 1.0]);
        let gg = SimpleFunction::new(vec![0.5, 1.0, 3.0]);
        let r = duality_pairing_check(&g, &phi, &swap, &f, &gg).unwrap();
        assert!(r.residual < 1e-15);
    }

    #[test]
    fn collapse_adjoint_on_tails() {
        let phi = YoungFunction::power_abs(2.0);
        let g = MeasureSpace::countable(WeightLaw::Geometric { a: 1.0, r: 0.5 }, 4).unwrap();
        let collapse = Transformation::from_law(MapLaw::Constant { m: 1 });
        let one = SimpleFunction::with_tail(vec![], crate::tail::TailLaw::constant(1.0));
        let a = adjoint_apply(&g, &phi, &collapse, &one).unwrap();
        // h(1)·E(1) = 2 at atom 1, 0 elsewhere
        assert!((a.values[0] - 2.0).abs() < 1e-15);
        assert!(a.values[1..].iter().all(|v| *v == 0.0));
    }
}
