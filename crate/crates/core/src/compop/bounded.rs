use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{density_verdict, membership};
use crate::error::{Error, Result};
use crate::measure::{MeasureSpace, SimpleFunction, Transformation};
use crate::norms::{luxemburg_norm, modular};
use crate::tail::{Monomial, Phase, TailLaw, TailSum};
use crate::verdict::{Decision, Verdict};
use crate::young::YoungFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case")]
pub enum SequenceBuilder {
    /// `f_n = f`.
    Constant { count: usize },
    /// `f_n = f·χ_{1..n}`.
    Truncations { count: usize },
    /// `f_n = f + decay^n·χ_{1..support}`.
    Perturbation { count: usize, decay: f64, support: usize },
}

impl SequenceBuilder {
    pub fn build(&self, space: &MeasureSpace, f: &SimpleFunction) -> Result<Vec<SimpleFunction>> {
        match *self {
            SequenceBuilder::Constant { count } => Ok(vec![f.clone(); count.max(1)]),
            SequenceBuilder::Truncations { count } => {
                let step = if space.is_countable() { 1 } else { 1.max(space.len() / count.max(1)) };
                (1..=count.max(1))
                    .map(|n| {
                        let len = if space.is_countable() { n * step } else { (n * step).min(space.len()) };
                        let mut g = f.extended(len)?.truncated(len);
                        if !space.is_countable() {
                            g.values.resize(space.len(), 0.0);
                        }
                        Ok(g)
                    })
                    .collect()
            }
            SequenceBuilder::Perturbation { count, decay, support } => {
                if !(0.0..1.0).contains(&decay) {
                    return Err(Error::Precondition("perturbation decay must lie in [0, 1)".into()));
                }
                let len = if space.is_countable() { support } else { support.min(space.len()) };
                (1..=count.max(1))
                    .map(|n| {
                        let mut bump = vec![decay.powi(n as i32); len];
                        if !space.is_countable() {
                            bump.resize(space.len(), 0.0);
                        }
                        f.add(&SimpleFunction::new(bump))
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosednessReport {
    /// `N_Φ(f_n − f)`.
    #[serde(with = "crate::measure::ext_real")]
    pub source_trail: Vec<f64>,
    /// `N_Φ(f_n∘φ − g)` with `g` the atomwise limit of `f_n∘φ`.
    #[serde(with = "crate::measure::ext_real")]
    pub image_trail: Vec<f64>,
    pub limit: SimpleFunction,
    pub converged: bool,
    /// `g = f∘φ` atomwise, asserted only when both trails converge.
    pub verdict: Verdict,
}

/// Graph-limit identity on a constructive sequence: if `f_n → f` and
/// `f_n∘φ → g` in norm then `g = f∘φ`.
pub fn closedness_demo(
    space: &MeasureSpace,
    phi: &YoungFunction,
    map: &Transformation,
    f: &SimpleFunction,
    builder: SequenceBuilder,
) -> Result<ClosednessReport> {
    let dv = density_verdict(space, phi, map)?;
    if !dv.is_dense() {
        return Err(Error::Precondition(format!("C_φ is not densely defined: {:?}", dv.status)));
    }
    let seq = builder.build(space, f)?;
    let images = seq.iter().map(|g| space.compose(g, map)).collect::<Result<Vec<_>>>()?;
    let limit = images.last().cloned().expect("nonempty sequence");
    let mut source_trail = Vec::with_capacity(seq.len());
    let mut image_trail = Vec::with_capacity(seq.len());
    for (g, img) in seq.iter().zip(&images) {
        source_trail.push(luxemburg_norm(space, phi, &g.sub(f)?)?.value);
        image_trail.push(luxemburg_norm(space, phi, &img.sub(&limit)?)?.value);
    }
    let scale = luxemburg_norm(space, phi, f)?.value.max(1.0);
    let tol = 1e-9 * scale;
    // from the first term within tolerance of f on, images must stay within tolerance of g
    let converged = source_trail
        .iter()
        .position(|d| *d <= tol)
        .is_some_and(|i0| source_trail[i0..].iter().chain(&image_trail[i0..]).all(|d| *d <= tol));
    let target = space.compose(f, map)?;
    let horizon = limit.len().max(target.len()).max(space.len());
    let mut worst = (0usize, 0.0f64);
    for i in 0..horizon {
        let (Some(a), Some(b)) = (limit.at(i), target.at(i)) else { continue };
        let d = if a == b { 0.0 } else { (a - b).abs() / (1.0 + b.abs()) };
        if d > worst.1 {
            worst = (i, d);
        }
    }
    let verdict = if !converged {
        Verdict::inconclusive("the constructed sequence did not converge; nothing to assert")
    } else if worst.1 <= 1e-8 {
        Verdict::holds(format!("g = f∘φ on the first {horizon} atoms"))
    } else {
        Verdict::fails(format!("g differs from f∘φ by {} (relative)", worst.1), Some(worst.0))
    };
    Ok(ClosednessReport { source_trail, image_trail, limit, converged, verdict })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BoundedStatus {
    /// `N_Φ(f∘φ) ≤ bound·N_Φ(f)` with `bound = max(1, sup h)`.
    EverywhereDefinedAndBounded {
        #[serde(with = "crate::measure::ext_real::scalar")]
        sup_h: f64,
        #[serde(with = "crate::measure::ext_real::scalar")]
        bound: f64,
    },
    NotEverywhereDefined { witness: SimpleFunction, note: String },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundednessVerdict {
    pub status: BoundedStatus,
    /// `N_Φ(f∘φ)/N_Φ(f)` over indicator probes.
    #[serde(with = "crate::measure::ext_real")]
    pub probe_log: Vec<f64>,
}

pub fn boundedness_verdict(
    space: &MeasureSpace,
    phi: &YoungFunction,
    map: &Transformation,
) -> Result<BoundednessVerdict> {
    let dv = density_verdict(space, phi, map)?;
    if !dv.is_dense() {
        return Err(Error::Precondition(format!("C_φ is not densely defined: {:?}", dv.status)));
    }
    let probe_log = indicator_ratios(space, phi, map, space.len().min(16))?;
    let h = space.radon_nikodym(map)?;
    let status = if h.values.iter().any(|v| v.is_nan()) {
        BoundedStatus::Inconclusive { reason: "h is unresolved at some atom".into() }
    } else if let Some(s) = h.sup_abs() {
        BoundedStatus::EverywhereDefinedAndBounded { sup_h: s, bound: s.max(1.0) }
    } else if h.tail().certainly_unbounded() {
        match unbounded_witness(space, phi, map, &h)? {
            Some((witness, note)) => BoundedStatus::NotEverywhereDefined { witness, note },
            None => BoundedStatus::Inconclusive {
                reason: "h is unbounded but no witness could be certified in closed form".into(),
            },
        }
    } else {
        BoundedStatus::Inconclusive { reason: "sup h is not resolved in closed form".into() }
    };
    Ok(BoundednessVerdict { status, probe_log })
}

/// `f` with `Φ(f)μ = 1/(n·h(n))` on one unbounded phase of `h`: then
/// `ρ_Φ(f) < ∞` while `ρ_Φ(f∘φ) = Σ Φ(f)hμ = Σ 1/n = ∞`, at every scale
/// when `Φ` is homogeneous.
fn unbounded_witness(
    space: &MeasureSpace,
    phi: &YoungFunction,
    map: &Transformation,
    h: &SimpleFunction,
) -> Result<Option<(SimpleFunction, String)>> {
    let (Some((k, p)), Some(w)) = (phi.homogeneous(), space.weight_monomial()) else {
        return Ok(None);
    };
    let TailLaw::Periodic { phases } = h.tail().into_owned() else {
        return Ok(None);
    };
    let period = phases.len() as u64;
    let start = h.len() as u64;
    let Some((j, hm)) = phases.iter().enumerate().find_map(|(j, ph)| match ph {
        Phase::Exact(m) if m.sup_over(start, j as u64, period).is_none() => Some((j, *m)),
        _ => None,
    }) else {
        return Ok(None);
    };
    let u = Monomial::new(1.0 / hm.c, -hm.alpha - 1.0, 1.0 / hm.rho);
    let fm = u.mul(&w.recip()).scale(1.0 / k).powf(1.0 / p);
    let mut out = vec![Phase::Zero; phases.len()];
    out[j] = Phase::Exact(fm);
    let witness = SimpleFunction::with_tail(vec![0.0; h.len()], TailLaw::Periodic { phases: out });
    let in_space = membership(space, phi, &witness)?;
    let composed = space.compose(&witness, map)?;
    let image = membership(space, phi, &composed)?;
    let certified = matches!(modular(space, phi, &witness)?, TailSum::Finite { hi, .. } if hi.is_finite());
    if in_space == Decision::Yes && image == Decision::No && certified {
        Ok(Some((
            witness,
            format!("ρ_Φ(f) < ∞ while ρ_Φ(k·f∘φ) = +∞ at every probed k; phase {j} of h grows without bound"),
        )))
    } else {
        Ok(None)
    }
}

fn ratio(space: &MeasureSpace, phi: &YoungFunction, map: &Transformation, f: &SimpleFunction) -> Result<f64> {
    let base = luxemburg_norm(space, phi, f)?.value;
    let image = luxemburg_norm(space, phi, &space.compose(f, map)?)?.value;
    Ok(image / base)
}

fn indicator_ratios(space: &MeasureSpace, phi: &YoungFunction, map: &Transformation, count: usize) -> Result<Vec<f64>> {
    (0..count)
        .map(|i| {
            let mut chi = vec![0.0; space.len()];
            chi[i] = 1.0;
            ratio(space, phi, map, &SimpleFunction::new(chi))
        })
        .collect()
}

/// `max N_Φ(f∘φ)/N_Φ(f)` over indicators and random prefix functions; a
/// lower bound on the operator norm.
pub fn operator_norm_estimate(
    space: &MeasureSpace,
    phi: &YoungFunction,
    map: &Transformation,
    probes: usize,
    seed: u64,
) -> Result<f64> {
    let n = space.len();
    let mut best = indicator_ratios(space, phi, map, n.min(probes)).map(|r| r.into_iter().fold(0.0, f64::max))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in n.min(probes)..probes {
        let f = SimpleFunction::new((0..n).map(|_| rng.gen_range(-10.0..10.0)).collect());
        if f.is_zero() {
            continue;
        }
        best = best.max(ratio(space, phi, map, &f)?);
    }
    Ok(best)
}
