//! Closed-form tail laws for functions on truncated countable spaces.
//!
//! Beyond its explicit prefix, a function on `ℕ` is described phase-wise
//! (by residue of the atom index modulo a period) as a monomial
//! `c · n^α · ρ^n`, or as a pair of monomials bracketing its absolute value.
//! Series of such terms are classified and summed in closed form, so that a
//! divergent tail is certified rather than approximated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `c · n^alpha · rho^n` for `n ≥ 1`, with `rho > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub c: f64,
    pub alpha: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Vanishing,
    Constant,
    Growing,
}

/// Rounds exponents and ratios that arithmetic left a few ulps away from an
/// integer (resp. from 1), so that borderline series keep their class.
fn snap(x: f64, to: f64) -> f64 {
    if (x - to).abs() <= 1e-12 * to.abs().max(1.0) {
        to
    } else {
        x
    }
}

impl Monomial {
    pub fn new(c: f64, alpha: f64, rho: f64) -> Self {
        Monomial { c, alpha: snap(alpha, alpha.round()), rho: snap(rho, 1.0) }
    }

    pub const fn constant(c: f64) -> Self {
        Monomial { c, alpha: 0.0, rho: 1.0 }
    }

    pub fn is_zero(&self) -> bool {
        self.c == 0.0
    }

    pub fn at(&self, n: u64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        let n = n as f64;
        let direct = n.powf(self.alpha) * self.rho.powf(n);
        if direct.is_normal() {
            return self.c * direct;
        }
        let log = self.alpha * n.ln() + n * self.rho.ln();
        self.c * log.exp()
    }

    pub fn abs(&self) -> Self {
        Monomial { c: self.c.abs(), ..*self }
    }

    pub fn scale(&self, k: f64) -> Self {
        Monomial { c: crate::mul0(self.c, k), ..*self }
    }

    pub fn mul(&self, other: &Monomial) -> Self {
        Monomial::new(crate::mul0(self.c, other.c), self.alpha + other.alpha, self.rho * other.rho)
    }

    /// `|m|^p`.
    pub fn powf(&self, p: f64) -> Self {
        Monomial::new(self.c.abs().powf(p), self.alpha * p, self.rho.powf(p))
    }

    pub fn recip(&self) -> Self {
        Monomial::new(1.0 / self.c, -self.alpha, 1.0 / self.rho)
    }

    pub fn trend(&self) -> Trend {
        if self.c == 0.0 {
            return Trend::Vanishing;
        }
        if self.rho < 1.0 || (self.rho == 1.0 && self.alpha < 0.0) {
            Trend::Vanishing
        } else if self.rho == 1.0 && self.alpha == 0.0 {
            Trend::Constant
        } else {
            Trend::Growing
        }
    }

    fn critical_point(&self) -> Option<f64> {
        if self.rho == 1.0 || self.alpha == 0.0 {
            None
        } else {
            Some(-self.alpha / self.rho.ln())
        }
    }

    /// Supremum of `|m(n)|` over `n > start`, `n ≡ phase (mod period)`.
    /// `None` when unbounded.
    pub fn sup_over(&self, start: u64, phase: u64, period: u64) -> Option<f64> {
        let m = self.abs();
        if m.c == 0.0 {
            return Some(0.0);
        }
        if m.c.is_infinite() {
            return None;
        }
        let n0 = first_in_phase(start, phase, period);
        match m.trend() {
            Trend::Growing => None,
            Trend::Constant => Some(m.c),
            Trend::Vanishing => {
                let mut best = m.at(n0);
                if let Some(peak) = m.critical_point() {
                    if peak > n0 as f64 {
                        for n in phase_neighbours(peak, n0, phase, period) {
                            best = best.max(m.at(n));
                        }
                    }
                }
                Some(best)
            }
        }
    }

    /// Infimum of `|m(n)|` over the same progression (zero for vanishing laws).
    pub fn inf_over(&self, start: u64, phase: u64, period: u64) -> f64 {
        let m = self.abs();
        if m.c == 0.0 {
            return 0.0;
        }
        let n0 = first_in_phase(start, phase, period);
        match m.trend() {
            Trend::Vanishing => 0.0,
            Trend::Constant => m.c,
            Trend::Growing => {
                let mut best = m.at(n0);
                if let Some(valley) = m.critical_point() {
                    if valley > n0 as f64 {
                        for n in phase_neighbours(valley, n0, phase, period) {
                            best = best.min(m.at(n));
                        }
                    }
                }
                best
            }
        }
    }

    /// Whether `self(n) ≤ other(n)` (in absolute value) for every `n > start`
    /// in the progression, returning the smallest constant `k` with
    /// `|self| ≤ k·|other|` there when it exists.
    pub fn ratio_sup(&self, other: &Monomial, start: u64, phase: u64, period: u64) -> Option<f64> {
        if self.c == 0.0 {
            return Some(0.0);
        }
        if other.c == 0.0 {
            return None;
        }
        let ratio = Monomial {
            c: self.c.abs() / other.c.abs(),
            alpha: self.alpha - other.alpha,
            rho: self.rho / other.rho,
        };
        ratio.sup_over(start, phase, period)
    }
}

fn first_in_phase(start: u64, phase: u64, period: u64) -> u64 {
    let mut n = start + 1;
    let r = n % period;
    if r != phase {
        n += (phase + period - r) % period;
    }
    n
}

fn phase_neighbours(x: f64, n0: u64, phase: u64, period: u64) -> Vec<u64> {
    let x = x.min(1e15);
    let k = ((x - n0 as f64) / period as f64).floor().max(0.0) as u64;
    let below = n0 + k * period;
    vec![below, below + period]
        .into_iter()
        .filter(|n| *n >= n0 && n % period == phase)
        .collect()
}

/// Outcome of summing a nonnegative tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailSum {
    Finite { lo: f64, hi: f64 },
    Infinite,
    Unresolved { partial: f64 },
}

impl TailSum {
    pub const ZERO: TailSum = TailSum::Finite { lo: 0.0, hi: 0.0 };

    pub fn exact(v: f64) -> Self {
        if v.is_infinite() {
            TailSum::Infinite
        } else {
            TailSum::Finite { lo: v, hi: v }
        }
    }

    pub fn add(self, other: TailSum) -> TailSum {
        use TailSum::*;
        match (self, other) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (Finite { lo: a, hi: b }, Finite { lo: c, hi: d }) => Finite { lo: a + c, hi: b + d },
            (Finite { lo, .. }, Unresolved { partial }) | (Unresolved { partial }, Finite { lo, .. }) => {
                Unresolved { partial: lo + partial }
            }
            (Unresolved { partial: a }, Unresolved { partial: b }) => Unresolved { partial: a + b },
        }
    }

    pub fn scale(self, k: f64) -> TailSum {
        match self {
            TailSum::Finite { lo, hi } => {
                if k.is_infinite() {
                    if hi == 0.0 {
                        TailSum::ZERO
                    } else if lo > 0.0 {
                        TailSum::Infinite
                    } else {
                        TailSum::Unresolved { partial: 0.0 }
                    }
                } else {
                    TailSum::Finite { lo: lo * k, hi: hi * k }
                }
            }
            TailSum::Infinite => {
                if k == 0.0 {
                    TailSum::ZERO
                } else {
                    TailSum::Infinite
                }
            }
            TailSum::Unresolved { partial } => TailSum::Unresolved { partial: crate::mul0(partial, k) },
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, TailSum::Finite { .. })
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, TailSum::Infinite)
    }

    /// Midpoint estimate, `+∞` for divergent sums and `None` when unresolved.
    pub fn value(&self) -> Option<f64> {
        match *self {
            TailSum::Finite { lo, hi } => Some(0.5 * (lo + hi)),
            TailSum::Infinite => Some(f64::INFINITY),
            TailSum::Unresolved { .. } => None,
        }
    }

    pub fn upper(&self) -> Option<f64> {
        match *self {
            TailSum::Finite { hi, .. } => Some(hi),
            TailSum::Infinite => Some(f64::INFINITY),
            TailSum::Unresolved { .. } => None,
        }
    }

    /// Certified lower bound.
    pub fn lower(&self) -> f64 {
        match *self {
            TailSum::Finite { lo, .. } => lo,
            TailSum::Infinite => f64::INFINITY,
            TailSum::Unresolved { partial } => partial,
        }
    }
}

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (a+k)^{-s}` for `s > 1`, `a > 0`,
/// by Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta requires s > 1, a > 0");
    const N: usize = 12;
    // B_{2j} / (2j)!
    const B2J_OVER_FACT: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
        -3617.0 / 10670622842880000.0,
    ];
    let mut sum = 0.0;
    for k in 0..N {
        sum += (a + k as f64).powf(-s);
    }
    let x = a + N as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising factorial s(s+1)...(s+2j-2) times x^{-s-2j+1}
    let mut poch = s;
    let mut xp = x.powf(-s - 1.0);
    for (j, b) in B2J_OVER_FACT.iter().enumerate() {
        let term = b * poch * xp;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        let k = 2.0 * j as f64;
        poch *= (s + k + 1.0) * (s + k + 2.0);
        xp /= x * x;
    }
    sum
}

const MAX_TERMS: u64 = 20_000_000;

/// `Σ m(n)` over `n > start`, `n ≡ phase (mod period)`, for `m.c ≥ 0`.
pub fn sum_progression(m: &Monomial, start: u64, phase: u64, period: u64) -> TailSum {
    let m = m.abs();
    if m.c == 0.0 {
        return TailSum::ZERO;
    }
    if m.c.is_infinite() {
        return TailSum::Infinite;
    }
    let n0 = first_in_phase(start, phase, period);
    let p = period as f64;
    if m.rho > 1.0 || (m.rho == 1.0 && m.alpha >= -1.0) {
        return TailSum::Infinite;
    }
    if m.rho == 1.0 {
        let s = -m.alpha;
        let v = m.c * p.powf(m.alpha) * hurwitz_zeta(s, n0 as f64 / p);
        return TailSum::exact(v);
    }
    if m.alpha == 0.0 {
        let first = m.at(n0);
        let v = first / (1.0 - m.rho.powf(p));
        return TailSum::exact(v);
    }
    // ρ < 1 with a polynomial factor: explicit summation with a geometric
    // remainder bound once consecutive-term ratios drop below one.
    let mut sum = 0.0;
    let mut n = n0;
    let mut count = 0u64;
    loop {
        let t = m.at(n);
        sum += t;
        let q = if m.alpha > 0.0 {
            ((n as f64 + p) / n as f64).powf(m.alpha) * m.rho.powf(p)
        } else {
            m.rho.powf(p)
        };
        if q < 1.0 {
            let rem = t * q / (1.0 - q);
            if rem <= 1e-16 * sum || rem < 1e-300 {
                return TailSum::Finite { lo: sum, hi: sum + rem };
            }
        }
        n += period;
        count += 1;
        if count > MAX_TERMS {
            return TailSum::Unresolved { partial: sum };
        }
    }
}

/// One residue class of a periodic tail law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Phase {
    Zero,
    Exact(Monomial),
    /// `lo(n) ≤ |f(n)| ≤ hi(n)`; `hi = None` when no upper bound is known.
    Bounded { lo: Monomial, hi: Option<Monomial> },
}

impl Phase {
    pub fn lower(&self) -> Monomial {
        match self {
            Phase::Zero => Monomial::constant(0.0),
            Phase::Exact(m) => m.abs(),
            Phase::Bounded { lo, .. } => lo.abs(),
        }
    }

    pub fn upper(&self) -> Option<Monomial> {
        match self {
            Phase::Zero => Some(Monomial::constant(0.0)),
            Phase::Exact(m) => Some(m.abs()),
            Phase::Bounded { hi, .. } => hi.map(|h| h.abs()),
        }
    }

    fn normalized(self) -> Phase {
        match self {
            Phase::Exact(m) if m.c == 0.0 => Phase::Zero,
            Phase::Bounded { lo, hi: Some(hi) } if hi.c == 0.0 && lo.c == 0.0 => Phase::Zero,
            Phase::Bounded { lo, hi: Some(hi) } if lo == hi => Phase::Exact(lo),
            p => p,
        }
    }

    pub fn mul(&self, other: &Phase) -> Phase {
        match (self, other) {
            (Phase::Zero, _) | (_, Phase::Zero) => Phase::Zero,
            (Phase::Exact(a), Phase::Exact(b)) => Phase::Exact(a.mul(b)),
            (a, b) => Phase::Bounded {
                lo: a.lower().mul(&b.lower()),
                hi: match (a.upper(), b.upper()) {
                    (Some(x), Some(y)) => Some(x.mul(&y)),
                    _ => None,
                },
            },
        }
        .normalized()
    }

    pub fn scale(&self, k: f64) -> Phase {
        match self {
            Phase::Zero => Phase::Zero,
            Phase::Exact(m) => Phase::Exact(m.scale(k)),
            Phase::Bounded { lo, hi } => Phase::Bounded {
                lo: lo.scale(k.abs()),
                hi: hi.map(|h| h.scale(k.abs())),
            },
        }
        .normalized()
    }
}

/// Values of a function beyond its explicit prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailLaw {
    /// `phases[n % phases.len()]` describes atom `n` (1-based).
    Periodic { phases: Vec<Phase> },
    Unresolved { reason: String },
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl TailLaw {
    pub fn zero() -> Self {
        TailLaw::Periodic { phases: vec![Phase::Zero] }
    }

    pub fn constant(c: f64) -> Self {
        TailLaw::monomial(Monomial::constant(c))
    }

    pub fn monomial(m: Monomial) -> Self {
        TailLaw::Periodic { phases: vec![Phase::Exact(m).normalized()] }
    }

    pub fn unresolved(reason: impl Into<String>) -> Self {
        TailLaw::Unresolved { reason: reason.into() }
    }

    pub fn period(&self) -> u64 {
        match self {
            TailLaw::Periodic { phases } => phases.len() as u64,
            TailLaw::Unresolved { .. } => 1,
        }
    }

    pub fn phase(&self, n: u64) -> Option<&Phase> {
        match self {
            TailLaw::Periodic { phases } => Some(&phases[(n % phases.len() as u64) as usize]),
            TailLaw::Unresolved { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            TailLaw::Periodic { phases } => phases.iter().all(|p| *p == Phase::Zero),
            TailLaw::Unresolved { .. } => false,
        }
    }

    pub fn is_resolved(&self) -> bool {
        matches!(self, TailLaw::Periodic { .. })
    }

    /// Exact pointwise value at atom `n`, if the law determines it.
    pub fn eval(&self, n: u64) -> Option<f64> {
        match self.phase(n)? {
            Phase::Zero => Some(0.0),
            Phase::Exact(m) => Some(m.at(n)),
            Phase::Bounded { .. } => None,
        }
    }

    fn with_period(&self, period: u64) -> Option<Vec<Phase>> {
        match self {
            TailLaw::Periodic { phases } => {
                let p = phases.len() as u64;
                Some((0..period).map(|j| phases[(j % p) as usize]).collect())
            }
            TailLaw::Unresolved { .. } => None,
        }
    }

    pub fn map_phases(&self, f: impl Fn(u64, &Phase) -> Phase) -> TailLaw {
        match self {
            TailLaw::Periodic { phases } => TailLaw::Periodic {
                phases: phases
                    .iter()
                    .enumerate()
                    .map(|(j, p)| f(j as u64, p).normalized())
                    .collect(),
            },
            u => u.clone(),
        }
    }

    pub fn mul(&self, other: &TailLaw) -> TailLaw {
        let period = lcm(self.period(), other.period());
        match (self.with_period(period), other.with_period(period)) {
            (Some(a), Some(b)) => TailLaw::Periodic {
                phases: a.iter().zip(&b).map(|(x, y)| x.mul(y)).collect(),
            },
            _ => TailLaw::unresolved(unresolved_reason(self, other)),
        }
    }

    pub fn scale(&self, k: f64) -> TailLaw {
        self.map_phases(|_, p| p.scale(k))
    }

    pub fn abs(&self) -> TailLaw {
        self.map_phases(|_, p| match p {
            Phase::Exact(m) => Phase::Exact(m.abs()),
            q => *q,
        })
    }

    /// Pointwise sum, valid for atoms beyond `start`.
    pub fn add(&self, other: &TailLaw, start: u64) -> TailLaw {
        let period = lcm(self.period(), other.period());
        let (a, b) = match (self.with_period(period), other.with_period(period)) {
            (Some(a), Some(b)) => (a, b),
            _ => return TailLaw::unresolved(unresolved_reason(self, other)),
        };
        let phases = a
            .iter()
            .zip(&b)
            .enumerate()
            .map(|(j, (x, y))| add_phase(x, y, start, j as u64, period))
            .collect();
        TailLaw::Periodic { phases }
    }

    /// `Σ_{n>start} |f(n)| · weight(n)`.
    pub fn sum_weighted(&self, weight: &Monomial, start: u64) -> TailSum {
        let phases = match self {
            TailLaw::Periodic { phases } => phases,
            TailLaw::Unresolved { .. } => return TailSum::Unresolved { partial: 0.0 },
        };
        let period = phases.len() as u64;
        let mut total = TailSum::ZERO;
        for (j, ph) in phases.iter().enumerate() {
            let j = j as u64;
            let part = match ph {
                Phase::Zero => TailSum::ZERO,
                Phase::Exact(m) => sum_progression(&m.abs().mul(weight), start, j, period),
                Phase::Bounded { lo, hi } => {
                    let lower = sum_progression(&lo.abs().mul(weight), start, j, period);
                    match hi {
                        Some(h) => match sum_progression(&h.abs().mul(weight), start, j, period) {
                            TailSum::Finite { hi, .. } => TailSum::Finite { lo: lower.lower(), hi },
                            _ if lower.is_infinite() => TailSum::Infinite,
                            _ => TailSum::Unresolved { partial: lower.lower().min(f64::MAX) },
                        },
                        None if lower.is_infinite() => TailSum::Infinite,
                        None => TailSum::Unresolved { partial: lower.lower() },
                    }
                }
            };
            total = total.add(part);
        }
        total
    }

    /// `Σ_{n>start} f(n) · weight(n)` with sign, for absolutely convergent
    /// exact tails.
    pub fn signed_sum(&self, weight: &Monomial, start: u64) -> Result<f64> {
        let phases = match self {
            TailLaw::Periodic { phases } => phases,
            TailLaw::Unresolved { reason } => return Err(Error::UnresolvedTail(reason.clone())),
        };
        let period = phases.len() as u64;
        let mut total = 0.0;
        for (j, ph) in phases.iter().enumerate() {
            match ph {
                Phase::Zero => {}
                Phase::Exact(m) => {
                    let s = sum_progression(&m.abs().mul(weight), start, j as u64, period);
                    match s {
                        TailSum::Finite { lo, hi } => total += m.c.signum() * 0.5 * (lo + hi),
                        TailSum::Infinite => {
                            return Err(Error::Divergent("tail series is not absolutely summable".into()))
                        }
                        TailSum::Unresolved { .. } => {
                            return Err(Error::UnresolvedTail("tail series did not settle".into()))
                        }
                    }
                }
                Phase::Bounded { .. } => {
                    return Err(Error::UnresolvedTail("signed sum of a bracketed tail".into()))
                }
            }
        }
        Ok(total)
    }

    /// `sup_{n>start} |f(n)|`; `None` when unbounded or unknown.
    pub fn sup_abs(&self, start: u64) -> Option<f64> {
        let phases = match self {
            TailLaw::Periodic { phases } => phases,
            TailLaw::Unresolved { .. } => return None,
        };
        let period = phases.len() as u64;
        let mut best: f64 = 0.0;
        for (j, ph) in phases.iter().enumerate() {
            let s = ph.upper()?.sup_over(start, j as u64, period)?;
            best = best.max(s);
        }
        Some(best)
    }

    /// Whether `|f|` is certainly unbounded on the tail.
    pub fn certainly_unbounded(&self) -> bool {
        match self {
            TailLaw::Periodic { phases } => phases
                .iter()
                .any(|p| p.lower().c > 0.0 && p.lower().trend() == Trend::Growing),
            TailLaw::Unresolved { .. } => false,
        }
    }
}

fn unresolved_reason(a: &TailLaw, b: &TailLaw) -> String {
    match (a, b) {
        (TailLaw::Unresolved { reason }, _) | (_, TailLaw::Unresolved { reason }) => reason.clone(),
        _ => "unresolved tail".into(),
    }
}

fn add_phase(x: &Phase, y: &Phase, start: u64, phase: u64, period: u64) -> Phase {
    match (x, y) {
        (Phase::Zero, p) | (p, Phase::Zero) => *p,
        (Phase::Exact(a), Phase::Exact(b)) if a.alpha == b.alpha && a.rho == b.rho => {
            Phase::Exact(Monomial { c: a.c + b.c, ..*a }).normalized()
        }
        _ => {
            let same_sign = match (x, y) {
                (Phase::Exact(a), Phase::Exact(b)) => a.c.signum() == b.c.signum(),
                (Phase::Exact(a), Phase::Bounded { .. }) | (Phase::Bounded { .. }, Phase::Exact(a)) => {
                    a.c >= 0.0
                }
                _ => true,
            };
            let lo = if same_sign {
                dominant_lower(&x.lower(), &y.lower(), start, phase, period)
            } else {
                Monomial::constant(0.0)
            };
            let hi = match (x.upper(), y.upper()) {
                (Some(a), Some(b)) => dominant_upper(&a, &b, start, phase, period),
                _ => None,
            };
            Phase::Bounded { lo, hi }.normalized()
        }
    }
}

fn dominant_lower(a: &Monomial, b: &Monomial, start: u64, phase: u64, period: u64) -> Monomial {
    // max(a, b) ≥ each; pick the one that dominates eventually
    match a.ratio_sup(b, start, phase, period) {
        Some(k) if k <= 1.0 => *b,
        _ => *a,
    }
}

fn dominant_upper(a: &Monomial, b: &Monomial, start: u64, phase: u64, period: u64) -> Option<Monomial> {
    if let Some(k) = b.ratio_sup(a, start, phase, period) {
        return Some(a.scale(1.0 + k));
    }
    a.ratio_sup(b, start, phase, period).map(|k| b.scale(1.0 + k))
}
