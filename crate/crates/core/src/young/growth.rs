use serde::{Deserialize, Serialize};

use super::YoungFunction;
use crate::error::{Error, Result};

/// Ratios above this are treated as divergent.
const DIVERGENCE: f64 = 1e6;

/// Log-spaced probe grid over `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRange {
    pub lo: f64,
    pub hi: f64,
    pub per_decade: usize,
}

impl Default for ProbeRange {
    fn default() -> Self {
        ProbeRange { lo: 1e-6, hi: 1e6, per_decade: 512 }
    }
}

impl ProbeRange {
    pub fn new(lo: f64, hi: f64, per_decade: usize) -> Result<Self> {
        let r = ProbeRange { lo, hi, per_decade };
        r.validate()?;
        Ok(r)
    }

    /// Default range at the coarser density used for two-variable probes.
    pub fn pairs() -> Self {
        ProbeRange { per_decade: 64, ..Self::default() }
    }

    pub fn with_density(self, per_decade: usize) -> Self {
        ProbeRange { per_decade, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.lo > 0.0 && self.lo.is_finite() && self.hi.is_finite() && self.hi > self.lo;
        if !ok || self.per_decade == 0 {
            return Err(Error::DegenerateRange { lo: self.lo, hi: self.hi });
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let decades = (self.hi / self.lo).log10();
        let n = (decades * self.per_decade as f64).ceil() as usize;
        let mut pts: Vec<f64> = (0..=n)
            .map(|k| self.lo * 10f64.powf(k as f64 / self.per_decade as f64))
            .filter(|x| *x < self.hi)
            .collect();
        pts.push(self.hi);
        pts
    }

    fn last_decade_start(&self) -> f64 {
        (self.hi / 10.0).max(self.lo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GrowthStatus {
    HoldsGlobally { constant: f64 },
    HoldsBeyond { x0: f64, constant: f64 },
    ViolatedAt { witness: f64 },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthVerdict {
    pub status: GrowthStatus,
    pub probe: ProbeRange,
}

impl GrowthVerdict {
    pub fn holds(&self) -> bool {
        matches!(self.status, GrowthStatus::HoldsGlobally { .. } | GrowthStatus::HoldsBeyond { .. })
    }

    pub fn holds_globally(&self) -> bool {
        matches!(self.status, GrowthStatus::HoldsGlobally { .. })
    }

    pub fn violated(&self) -> bool {
        matches!(self.status, GrowthStatus::ViolatedAt { .. })
    }

    /// Certified constant, when the condition holds on some region.
    pub fn constant(&self) -> Option<f64> {
        match self.status {
            GrowthStatus::HoldsGlobally { constant } | GrowthStatus::HoldsBeyond { constant, .. } => {
                Some(constant)
            }
            _ => None,
        }
    }

    /// Threshold past which the condition is certified (0 when global).
    pub fn x0(&self) -> Option<f64> {
        match self.status {
            GrowthStatus::HoldsGlobally { .. } => Some(0.0),
            GrowthStatus::HoldsBeyond { x0, .. } => Some(x0),
            _ => None,
        }
    }
}

/// `ln(num/den)` with `0/anything` satisfied and `positive/0` divergent.
fn log_ratio(log_num: f64, log_den: f64) -> f64 {
    if log_num == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else if log_den == f64::NEG_INFINITY || log_num == f64::INFINITY {
        f64::INFINITY
    } else {
        let r = log_num - log_den;
        if r.is_nan() {
            f64::INFINITY
        } else {
            r
        }
    }
}

struct Sample {
    /// Region coordinate: the condition is claimed for samples with `at ≥ x0`.
    at: f64,
    /// Position along the diagonal, for the divergence trend.
    diag: Option<f64>,
    log_ratio: f64,
}

fn grade(samples: &[Sample], grid: &[f64], range: ProbeRange) -> GrowthVerdict {
    let threshold = DIVERGENCE.ln();
    let verdict = |status| GrowthVerdict { status, probe: range };
    let violations: Vec<&Sample> = samples.iter().filter(|s| s.log_ratio > threshold).collect();
    let max_over = |x0: f64| {
        samples
            .iter()
            .filter(|s| s.at >= x0)
            .map(|s| s.log_ratio)
            .fold(f64::NEG_INFINITY, f64::max)
            .exp()
    };
    if violations.is_empty() {
        return verdict(GrowthStatus::HoldsGlobally { constant: max_over(0.0) });
    }
    let cut = range.last_decade_start();
    let tail: Vec<&Sample> = samples.iter().filter(|s| s.diag.is_some_and(|d| d >= cut)).collect();
    if let Some(first) = tail.iter().find(|s| s.log_ratio > threshold) {
        let nondecreasing = tail.windows(2).all(|w| {
            let (a, b) = (w[0].log_ratio, w[1].log_ratio);
            b >= a || (a.is_finite() && b >= a - 1e-9 * a.abs().max(1.0))
        });
        return if nondecreasing {
            verdict(GrowthStatus::ViolatedAt { witness: first.diag.unwrap() })
        } else {
            verdict(GrowthStatus::Inconclusive {
                reason: "ratio exceeds the divergence threshold in the last decade without a growing trend".into(),
            })
        };
    }
    let last = violations.iter().map(|s| s.at).fold(0.0, f64::max);
    match grid.iter().find(|x| **x > last) {
        Some(&x0) => verdict(GrowthStatus::HoldsBeyond { x0, constant: max_over(x0) }),
        None => verdict(GrowthStatus::Inconclusive { reason: "violations up to the end of the grid".into() }),
    }
}

/// `Φ(2x) ≤ KΦ(x)`.
pub fn delta2_probe(phi: &YoungFunction, range: ProbeRange) -> Result<GrowthVerdict> {
    range.validate()?;
    let grid = range.grid();
    let samples: Vec<Sample> = grid
        .iter()
        .map(|&x| Sample {
            at: x,
            diag: Some(x),
            log_ratio: log_ratio(phi.log_eval(2.0 * x), phi.log_eval(x)),
        })
        .collect();
    Ok(grade(&samples, &grid, range))
}

fn pair_samples(grid: &[f64], mut f: impl FnMut(f64, f64) -> f64) -> Vec<Sample> {
    let mut out = Vec::with_capacity(grid.len() * (grid.len() + 1) / 2);
    for (i, &x) in grid.iter().enumerate() {
        for &y in &grid[i..] {
            out.push(Sample { at: x, diag: (x == y).then_some(x), log_ratio: f(x, y) });
        }
    }
    out
}

/// `Φ(xy) ≤ dΦ(x)Φ(y)`; a success is cross-checked against [`delta2_probe`].
pub fn delta_prime_probe(phi: &YoungFunction, range: ProbeRange) -> Result<GrowthVerdict> {
    range.validate()?;
    let grid = range.grid();
    let samples = pair_samples(&grid, |x, y| {
        log_ratio(phi.log_eval(x * y), phi.log_eval(x) + phi.log_eval(y))
    });
    let verdict = grade(&samples, &grid, range);
    if verdict.holds() && !delta2_probe(phi, range)?.holds() {
        return Ok(GrowthVerdict {
            status: GrowthStatus::Inconclusive {
                reason: "Δ′ certified but Δ₂ not certified on the same grid".into(),
            },
            probe: range,
        });
    }
    Ok(verdict)
}

/// `Φ(bxy) ≥ Φ(x)Φ(y)`; the constant is the smallest grid-certified `b`.
pub fn nabla_prime_probe(phi: &YoungFunction, range: ProbeRange) -> Result<GrowthVerdict> {
    range.validate()?;
    let grid = range.grid();
    let samples = pair_samples(&grid, |x, y| {
        let lp = phi.log_eval(x) + phi.log_eval(y);
        if lp == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let t = phi.inverse_of_exp(lp);
        if t.is_infinite() || (t == phi.domain_end() && lp > phi.log_eval(t)) {
            return f64::INFINITY;
        }
        t.ln() - x.ln() - y.ln()
    });
    Ok(grade(&samples, &grid, range))
}

/// `Φ(x)/x → 0` at zero and `→ ∞` at infinity, with `Φ > 0` away from zero.
/// The certified constant is the smaller of the two log-log slopes.
pub fn n_function_probe(phi: &YoungFunction, range: ProbeRange) -> Result<GrowthVerdict> {
    range.validate()?;
    let grid = range.grid();
    let verdict = |status| GrowthVerdict { status, probe: range };
    for &x in &grid {
        let v = phi.eval(x);
        if v == 0.0 || !v.is_finite() {
            return Ok(verdict(GrowthStatus::ViolatedAt { witness: x }));
        }
    }
    let log_r = |x: f64| phi.log_eval(x) - x.ln();
    let slope = |a: f64, b: f64| (log_r(b) - log_r(a)) / (b.ln() - a.ln());
    let first_end = (range.lo * 10.0).min(range.hi);
    let last_start = range.last_decade_start();
    let low = slope(range.lo, first_end);
    let high = slope(last_start, range.hi);
    for (s, at) in [(low, range.lo), (high, range.hi)] {
        if s.abs() < 1e-5 {
            return Ok(verdict(GrowthStatus::ViolatedAt { witness: at }));
        }
    }
    if low >= 1e-3 && high >= 1e-3 {
        Ok(verdict(GrowthStatus::HoldsGlobally { constant: low.min(high) }))
    } else {
        Ok(verdict(GrowthStatus::Inconclusive {
            reason: format!("log-log slopes of Φ(x)/x: {low:.3e} near 0, {high:.3e} near ∞"),
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumBounds {
    /// `Φ(a+b) ≤ K(Φ(a)+Φ(b))`.
    pub k: GrowthVerdict,
    /// `Φ⁻¹(a)+Φ⁻¹(b) ≤ LΦ⁻¹(a+b)`.
    pub l: GrowthVerdict,
    /// Superadditivity of `Φ` and subadditivity of `Φ⁻¹` held at every sample.
    pub reverse_holds: bool,
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi.is_infinite() {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

pub fn sum_bound_constants(phi: &YoungFunction, range: ProbeRange) -> Result<SumBounds> {
    range.validate()?;
    let grid = range.grid();
    let slack = 1e-9;
    let mut reverse_holds = true;
    let k_samples = pair_samples(&grid, |a, b| {
        let r = log_ratio(phi.log_eval(a + b), log_add(phi.log_eval(a), phi.log_eval(b)));
        if r < -slack {
            reverse_holds = false;
        }
        r
    });
    let l_samples = pair_samples(&grid, |a, b| {
        let (ia, ib, iab) = (phi.generalized_inverse(a), phi.generalized_inverse(b), phi.generalized_inverse(a + b));
        if iab > (ia + ib) * (1.0 + slack) {
            reverse_holds = false;
        }
        log_ratio((ia + ib).ln(), iab.ln())
    });
    Ok(SumBounds {
        k: grade(&k_samples, &grid, range),
        l: grade(&l_samples, &grid, range),
        reverse_holds,
    })
}
