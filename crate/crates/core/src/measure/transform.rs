use serde::{Deserialize, Serialize};

use super::{MeasureSpace, SimpleFunction, WeightLaw};
use crate::error::{Error, Result};
use crate::tail::{Monomial, Phase, TailLaw, TailSum};

/// Search cap when looking for the point past which a law governs a map.
const SEPARATION_CAP: u64 = 1 << 20;

/// Closed-form index map on `ℕ` (atoms are 1-based here).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum MapLaw {
    Identity,
    /// `n ↦ n + k`.
    Shift { k: u64 },
    /// `n ↦ m`.
    Constant { m: u64 },
    /// `n ↦ ⌈n/k⌉`.
    Divide { k: u64 },
    /// `n ↦ k·n`.
    Multiply { k: u64 },
    /// `2j−1 ↔ 2j`.
    PairSwap,
    /// Apply each law in turn, first to last.
    Compose { laws: Vec<MapLaw> },
}

/// Preimage of a single atom under a law.
#[derive(Debug, Clone, PartialEq)]
pub enum Fiber {
    Finite(Vec<u64>),
    All,
}

impl MapLaw {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidMap(m.into()));
        match self {
            MapLaw::Shift { k } if *k == 0 => bad("shift by zero; use identity"),
            MapLaw::Constant { m } if *m == 0 => bad("atoms are numbered from 1"),
            MapLaw::Divide { k } | MapLaw::Multiply { k } if *k == 0 => bad("factor must be positive"),
            MapLaw::Compose { laws } => laws.iter().try_for_each(|l| l.validate()),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, n: u64) -> u64 {
        match self {
            MapLaw::Identity => n,
            MapLaw::Shift { k } => n + k,
            MapLaw::Constant { m } => *m,
            MapLaw::Divide { k } => n.div_ceil(*k),
            MapLaw::Multiply { k } => n * k,
            MapLaw::PairSwap => {
                if n % 2 == 1 {
                    n + 1
                } else {
                    n - 1
                }
            }
            MapLaw::Compose { laws } => laws.iter().fold(n, |x, l| l.eval(x)),
        }
    }

    /// `self` then `next`.
    pub fn then(&self, next: &MapLaw) -> MapLaw {
        let mut laws = self.flattened();
        laws.extend(next.flattened());
        MapLaw::Compose { laws }.simplified()
    }

    fn flattened(&self) -> Vec<MapLaw> {
        match self {
            MapLaw::Compose { laws } => laws.iter().flat_map(|l| l.flattened()).collect(),
            MapLaw::Identity => vec![],
            l => vec![l.clone()],
        }
    }

    fn combine(a: &MapLaw, b: &MapLaw) -> Option<MapLaw> {
        use MapLaw::*;
        Some(match (a, b) {
            (Constant { m }, l) => Constant { m: l.eval(*m) },
            (_, Constant { m }) => Constant { m: *m },
            (Shift { k: j }, Shift { k }) => Shift { k: j + k },
            (Multiply { k: j }, Multiply { k }) => Multiply { k: j * k },
            (Divide { k: j }, Divide { k }) => Divide { k: j * k },
            (Multiply { k: j }, Divide { k }) if j == k => Identity,
            (PairSwap, PairSwap) => Identity,
            _ => return None,
        })
    }

    /// Canonical form: nested compositions flattened, identities dropped and
    /// adjacent laws merged where a closed form exists.
    pub fn simplified(&self) -> MapLaw {
        let mut laws: Vec<MapLaw> = self
            .flattened()
            .into_iter()
            .map(|l| match l {
                MapLaw::Divide { k: 1 } | MapLaw::Multiply { k: 1 } => MapLaw::Identity,
                l => l,
            })
            .filter(|l| *l != MapLaw::Identity)
            .collect();
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..laws.len().saturating_sub(1) {
                if let Some(c) = MapLaw::combine(&laws[i], &laws[i + 1]) {
                    laws.splice(i..i + 2, (c != MapLaw::Identity).then_some(c));
                    changed = true;
                    break;
                }
            }
        }
        match laws.len() {
            0 => MapLaw::Identity,
            1 => laws.pop().unwrap(),
            _ => MapLaw::Compose { laws },
        }
    }

    pub fn is_injective(&self) -> bool {
        match self {
            MapLaw::Identity | MapLaw::Shift { .. } | MapLaw::Multiply { .. } | MapLaw::PairSwap => true,
            MapLaw::Divide { k } => *k == 1,
            MapLaw::Constant { .. } => false,
            MapLaw::Compose { laws } => laws.iter().all(|l| l.is_injective()),
        }
    }

    /// Full preimage of atom `y`. Compositions are simplified first, so a
    /// composite never hides a constant law.
    pub fn preimage(&self, y: u64) -> Fiber {
        match self {
            MapLaw::Identity => Fiber::Finite(vec![y]),
            MapLaw::Shift { k } => Fiber::Finite(if y > *k { vec![y - k] } else { vec![] }),
            MapLaw::Constant { m } => {
                if y == *m {
                    Fiber::All
                } else {
                    Fiber::Finite(vec![])
                }
            }
            MapLaw::Divide { k } => Fiber::Finite(((y - 1) * k + 1..=y * k).collect()),
            MapLaw::Multiply { k } => Fiber::Finite(if y.is_multiple_of(*k) { vec![y / k] } else { vec![] }),
            MapLaw::PairSwap => Fiber::Finite(vec![if y % 2 == 1 { y + 1 } else { y - 1 }]),
            MapLaw::Compose { .. } => match self.simplified() {
                MapLaw::Compose { laws } => {
                    let mut set = vec![y];
                    for l in laws.iter().rev() {
                        let mut next = Vec::new();
                        for z in set {
                            match l.preimage(z) {
                                Fiber::Finite(v) => next.extend(v),
                                Fiber::All => return Fiber::All,
                            }
                        }
                        set = next;
                    }
                    set.sort_unstable();
                    Fiber::Finite(set)
                }
                l => l.preimage(y),
            },
        }
    }

    /// A lower bound on `self(n)` over all `n > k`.
    pub fn floor_beyond(&self, k: u64) -> u64 {
        match self {
            MapLaw::Identity => k + 1,
            MapLaw::Shift { k: s } => k + 1 + s,
            MapLaw::Constant { m } => *m,
            MapLaw::Divide { k: d } => (k + 1).div_ceil(*d),
            MapLaw::Multiply { k: d } => (k + 1) * d,
            MapLaw::PairSwap => k + k.is_multiple_of(2) as u64,
            MapLaw::Compose { laws } => {
                let mut bound = k + 1;
                for l in laws {
                    bound = l.floor_beyond(bound.saturating_sub(1));
                }
                bound
            }
        }
    }

    /// `self(n) = (a·n + b_j)/d` for `n ≡ j (mod q)`, when the law is affine
    /// on residue classes.
    fn affine(&self) -> Option<Affine> {
        let one = |b: i64| Affine { q: 1, a: 1, d: 1, b: vec![b] };
        Some(match self {
            MapLaw::Identity => one(0),
            MapLaw::Shift { k } => one(*k as i64),
            MapLaw::Multiply { k } => Affine { q: 1, a: *k, d: 1, b: vec![0] },
            MapLaw::Divide { k } => Affine {
                q: *k,
                a: 1,
                d: *k,
                b: (0..*k).map(|j| ((k - j) % k) as i64).collect(),
            },
            MapLaw::PairSwap => Affine { q: 2, a: 1, d: 1, b: vec![-1, 1] },
            MapLaw::Constant { .. } | MapLaw::Compose { .. } => return None,
        })
    }

    fn label(&self) -> String {
        match self {
            MapLaw::Identity => "n".into(),
            MapLaw::Shift { k } => format!("n+{k}"),
            MapLaw::Constant { m } => format!("{m}"),
            MapLaw::Divide { k } => format!("⌈n/{k}⌉"),
            MapLaw::Multiply { k } => format!("{k}n"),
            MapLaw::PairSwap => "pair-swap".into(),
            MapLaw::Compose { laws } => laws.iter().map(|l| l.label()).collect::<Vec<_>>().join(" ; "),
        }
    }
}

struct Affine {
    q: u64,
    a: u64,
    d: u64,
    b: Vec<i64>,
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

/// Measurable map between atoms: explicit targets on a prefix, then a law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transformation {
    /// 0-based target index of each atom in the explicit prefix.
    pub targets: Vec<usize>,
    /// Governs atoms past the explicit prefix on countable spaces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<MapLaw>,
}

impl Transformation {
    pub fn explicit(targets: Vec<usize>) -> Self {
        Transformation { targets, law: None }
    }

    pub fn from_law(law: MapLaw) -> Self {
        Transformation { targets: vec![], law: Some(law) }
    }

    pub fn with_law(targets: Vec<usize>, law: MapLaw) -> Self {
        Transformation { targets, law: Some(law) }
    }

    pub fn identity(space: &MeasureSpace) -> Self {
        if space.is_countable() {
            Transformation::from_law(MapLaw::Identity)
        } else {
            Transformation::explicit((0..space.len()).collect())
        }
    }

    pub fn validate(&self, space: &MeasureSpace) -> Result<()> {
        match space {
            MeasureSpace::Finite { .. } => {
                if self.law.is_some() {
                    return Err(Error::InvalidMap("a law needs a countable space".into()));
                }
                if self.targets.len() != space.len() {
                    return Err(Error::InvalidMap(format!(
                        "expected {} targets, got {}",
                        space.len(),
                        self.targets.len()
                    )));
                }
                if let Some(t) = self.targets.iter().find(|t| **t >= space.len()) {
                    return Err(Error::InvalidMap(format!("target index {t} outside the space")));
                }
                Ok(())
            }
            MeasureSpace::Countable { .. } => self.law().validate(),
        }
    }

    pub fn law(&self) -> MapLaw {
        self.law.as_ref().map(|l| l.simplified()).unwrap_or(MapLaw::Identity)
    }

    /// Target index of atom `i`.
    pub fn target(&self, i: usize) -> usize {
        match self.targets.get(i) {
            Some(t) => *t,
            None => self.law().eval(i as u64 + 1) as usize - 1,
        }
    }

    /// Largest atom number hit by an atom of the explicit prefix, covering
    /// also the law applied to prefix atoms; past it every preimage is
    /// governed by the law alone.
    fn image_horizon(&self) -> u64 {
        let law = self.law();
        let lt = self.targets.len() as u64;
        let explicit = self.targets.iter().map(|t| *t as u64 + 1).max().unwrap_or(0);
        let by_law = (1..=lt).map(|n| law.eval(n)).max().unwrap_or(0);
        let floor = match law {
            MapLaw::Shift { k } => k,
            MapLaw::Constant { m } => m,
            _ => 0,
        };
        lt.max(explicit).max(by_law).max(floor)
    }

    /// Smallest `K ≥ start` such that every atom past `K` is mapped by the
    /// law beyond both `K`'s images and `beyond`.
    pub(super) fn separation(&self, start: u64, beyond: u64) -> Result<u64> {
        let law = self.law();
        let mut k = start.max(self.targets.len() as u64);
        let mut max_image = (0..k as usize).map(|i| self.target(i) as u64 + 1).max().unwrap_or(0);
        loop {
            let floor = law.floor_beyond(k);
            if floor > max_image && floor > beyond {
                return Ok(k);
            }
            k += 1;
            max_image = max_image.max(self.target(k as usize - 1) as u64 + 1);
            if k > SEPARATION_CAP {
                return Err(Error::UnresolvedTail(format!(
                    "law {} does not separate prefix from tail",
                    law.label()
                )));
            }
        }
    }

    /// Whether `φ` is a bijection of the atoms.
    pub fn is_bijective(&self, space: &MeasureSpace) -> bool {
        let perm = |t: &[usize]| {
            let mut seen = vec![false; t.len()];
            t.iter().all(|x| *x < t.len() && !std::mem::replace(&mut seen[*x], true))
        };
        match space {
            MeasureSpace::Finite { .. } => perm(&self.targets),
            MeasureSpace::Countable { .. } => match self.law() {
                MapLaw::Identity => perm(&self.targets),
                MapLaw::PairSwap => self.targets.len().is_multiple_of(2) && perm(&self.targets),
                _ => false,
            },
        }
    }

    /// `x ↦ next(self(x))`.
    pub fn then(&self, next: &Transformation, space: &MeasureSpace) -> Result<Transformation> {
        if !space.is_countable() {
            return Ok(Transformation::explicit(self.targets.iter().map(|t| next.targets[*t]).collect()));
        }
        let law = self.law();
        if let MapLaw::Constant { m } = law {
            let lt = self.targets.len();
            let targets = (0..lt).map(|i| next.target(self.target(i))).collect();
            let m = next.target(m as usize - 1) as u64 + 1;
            return Ok(Transformation::with_law(targets, MapLaw::Constant { m }));
        }
        let k = self.separation(self.targets.len() as u64, next.targets.len() as u64)?;
        let targets = (0..k as usize).map(|i| next.target(self.target(i))).collect();
        Ok(Transformation::with_law(targets, law.then(&next.law())))
    }

    pub fn iterate(&self, times: usize, space: &MeasureSpace) -> Result<Transformation> {
        if times == 0 {
            return Err(Error::InvalidMap("iteration count must be positive".into()));
        }
        let mut out = self.clone();
        for _ in 1..times {
            out = out.then(self, space)?;
        }
        Ok(out)
    }

    /// Prefix length and law of the explicit region of `h`.
    fn h_len(&self, space: &MeasureSpace) -> usize {
        match space {
            MeasureSpace::Finite { .. } => space.len(),
            MeasureSpace::Countable { .. } => (self.image_horizon() as usize).max(space.len()),
        }
    }

    /// `μ(φ⁻¹({y}))` for the atom with index `y`.
    pub fn fiber_measure(&self, space: &MeasureSpace, y: usize) -> TailSum {
        let explicit: f64 = self
            .targets
            .iter()
            .enumerate()
            .filter(|(_, t)| **t == y)
            .map(|(i, _)| space.weight(i))
            .sum();
        if !space.is_countable() {
            return TailSum::exact(explicit);
        }
        let lt = self.targets.len() as u64;
        let by_law = match self.law().preimage(y as u64 + 1) {
            Fiber::All => space.mass_beyond(lt as usize),
            Fiber::Finite(ns) => TailSum::exact(
                ns.iter().filter(|n| **n > lt).map(|n| space.weight(*n as usize - 1)).sum(),
            ),
        };
        TailSum::exact(explicit).add(by_law)
    }
}

fn rn_value(fiber: TailSum, weight: f64) -> f64 {
    match fiber {
        TailSum::Infinite => f64::INFINITY,
        TailSum::Unresolved { .. } => f64::NAN,
        s => s.value().unwrap_or(f64::NAN) / weight + 0.0,
    }
}

/// Closed-form tail of `h` past `start` for a law on a weight law.
fn rn_tail(law: &MapLaw, w: WeightLaw, start: u64) -> TailLaw {
    let s1 = (start + 1) as f64;
    let cst = |c: f64| Phase::Exact(Monomial::constant(c));
    let between = |lo: f64, hi: f64| Phase::Bounded { lo: Monomial::constant(lo), hi: Some(Monomial::constant(hi)) };
    let single = |p: Phase| TailLaw::Periodic { phases: vec![p] };
    match (law, w) {
        (MapLaw::Identity, _) => TailLaw::constant(1.0),
        (MapLaw::Constant { .. }, _) => TailLaw::zero(),
        (MapLaw::Shift { k }, WeightLaw::Geometric { r, .. }) => TailLaw::constant(r.powf(-(*k as f64))),
        (MapLaw::Shift { .. }, WeightLaw::Constant { .. }) => TailLaw::constant(1.0),
        (MapLaw::Shift { k }, WeightLaw::PowerLaw { s, .. }) => {
            single(between(1.0, (1.0 - *k as f64 / s1).powf(-s)))
        }
        (MapLaw::Divide { k }, WeightLaw::Geometric { r, .. }) => {
            let k = *k as f64;
            let c = r.powf(1.0 - k) * (1.0 - r.powf(k)) / (1.0 - r);
            TailLaw::monomial(Monomial::new(c, 0.0, r.powf(k - 1.0)))
        }
        (MapLaw::Divide { k }, WeightLaw::Constant { .. }) => TailLaw::constant(*k as f64),
        (MapLaw::Divide { k }, WeightLaw::PowerLaw { s, .. }) => {
            let k = *k as f64;
            single(between(k.powf(1.0 - s), k * (k - (k - 1.0) / s1).powf(-s)))
        }
        (MapLaw::Multiply { k }, w) => {
            let kf = *k as f64;
            let hit = match w {
                WeightLaw::Geometric { r, .. } => Phase::Exact(Monomial::new(1.0, 0.0, r.powf(-(kf - 1.0) / kf))),
                WeightLaw::Constant { .. } => cst(1.0),
                WeightLaw::PowerLaw { s, .. } => cst(kf.powf(s)),
            };
            let mut phases = vec![Phase::Zero; *k as usize];
            phases[0] = hit;
            TailLaw::Periodic { phases }
        }
        (MapLaw::PairSwap, w) => {
            let (even, odd) = match w {
                WeightLaw::Geometric { r, .. } => (cst(1.0 / r), cst(r)),
                WeightLaw::Constant { .. } => (cst(1.0), cst(1.0)),
                WeightLaw::PowerLaw { s, .. } => (
                    between(1.0, (1.0 - 1.0 / s1).powf(-s)),
                    between((1.0 + 1.0 / s1).powf(-s), 1.0),
                ),
            };
            TailLaw::Periodic { phases: vec![even, odd] }
        }
        (MapLaw::Compose { .. }, _) => {
            TailLaw::unresolved(format!("no closed form for the Radon–Nikodym derivative of {}", law.label()))
        }
    }
}

impl MeasureSpace {
    /// `h = dμ∘φ⁻¹/dμ`; `+∞` where a fiber has infinite measure, `NaN`
    /// where it could not be summed.
    pub fn radon_nikodym(&self, phi: &Transformation) -> Result<SimpleFunction> {
        phi.validate(self)?;
        let len = phi.h_len(self);
        let values = (0..len).map(|y| rn_value(phi.fiber_measure(self, y), self.weight(y))).collect();
        Ok(match self.law() {
            None => SimpleFunction::new(values),
            Some(w) => SimpleFunction::with_tail(values, rn_tail(&phi.law(), w, len as u64)),
        })
    }

    pub fn iterated_rn(&self, phi: &Transformation, i: usize) -> Result<SimpleFunction> {
        self.radon_nikodym(&phi.iterate(i, self)?)
    }

    /// `h₋₁ = dμ∘φ/dμ` for bijective `φ`.
    pub fn inverse_rn(&self, phi: &Transformation) -> Result<SimpleFunction> {
        phi.validate(self)?;
        if !phi.is_bijective(self) {
            return Err(Error::Precondition("h₋₁ needs a bijective transformation".into()));
        }
        let len = phi.targets.len().max(self.len());
        let values = (0..len).map(|x| self.weight(phi.target(x)) / self.weight(x)).collect();
        Ok(match self.law() {
            None => SimpleFunction::new(values),
            // the bijective laws are involutions, so h₋₁ and h share a tail
            Some(w) => SimpleFunction::with_tail(values, rn_tail(&phi.law(), w, len as u64)),
        })
    }

    /// Inverse of a bijective transformation.
    pub fn inverse_map(&self, phi: &Transformation) -> Result<Transformation> {
        if !phi.is_bijective(self) {
            return Err(Error::Precondition("only bijective transformations are inverted".into()));
        }
        let mut inv = vec![0; phi.targets.len()];
        for (i, t) in phi.targets.iter().enumerate() {
            inv[*t] = i;
        }
        Ok(Transformation { targets: inv, law: phi.law.clone() })
    }

    /// `f∘φ`.
    pub fn compose(&self, f: &SimpleFunction, phi: &Transformation) -> Result<SimpleFunction> {
        phi.validate(self)?;
        if !self.is_countable() {
            let values = (0..self.len())
                .map(|i| f.at(phi.target(i)).ok_or_else(|| Error::InvalidFunction("function shorter than space".into())))
                .collect::<Result<Vec<_>>>()?;
            return Ok(SimpleFunction::new(values));
        }
        let law = phi.law();
        let value = |i: usize| {
            f.at(phi.target(i))
                .ok_or_else(|| Error::UnresolvedTail(format!("value of f at atom {} is only bracketed", phi.target(i) + 1)))
        };
        if let MapLaw::Constant { m } = law {
            let len = phi.targets.len().max(self.len());
            let values = (0..len).map(value).collect::<Result<Vec<_>>>()?;
            let c = f.at(m as usize - 1);
            let tail = match c {
                Some(c) => TailLaw::constant(c),
                None => TailLaw::unresolved("value at the constant target is only bracketed"),
            };
            return Ok(SimpleFunction::with_tail(values, tail));
        }
        let k = phi.separation(self.len() as u64, f.len() as u64)?;
        let values = (0..k as usize).map(value).collect::<Result<Vec<_>>>()?;
        let tail = if f.has_tail() {
            compose_tail(&f.tail(), &law, k)
        } else {
            TailLaw::zero()
        };
        Ok(SimpleFunction::with_tail(values, tail))
    }
}

/// Tail of `f∘law` for atoms past `start`, given `f`'s tail law.
fn compose_tail(tail: &TailLaw, law: &MapLaw, start: u64) -> TailLaw {
    let phases = match tail {
        TailLaw::Periodic { phases } => phases,
        TailLaw::Unresolved { .. } => return tail.clone(),
    };
    let Some(aff) = law.affine() else {
        return TailLaw::unresolved(format!("cannot compose a tail law with {}", law.label()));
    };
    let p = phases.len() as u64;
    let period = lcm(aff.q, aff.d) * p;
    let mut out = Vec::with_capacity(period as usize);
    for j in 0..period {
        let b = aff.b[(j % aff.q) as usize];
        let n0 = j + period;
        let m0 = ((aff.a * n0) as i64 + b) as u64 / aff.d;
        let ph = &phases[(m0 % p) as usize];
        out.push(substitute(ph, aff.a, aff.d, b, start));
    }
    TailLaw::Periodic { phases: out }
}

/// `g(n) = m((a·n + b)/d)` for `n > start`.
fn substitute(ph: &Phase, a: u64, d: u64, b: i64, start: u64) -> Phase {
    let (a, d, b) = (a as f64, d as f64, b as f64);
    let beta = b / a;
    let sub = |m: &Monomial| -> (Monomial, f64) {
        let base = Monomial::new(
            m.c * (a / d).powf(m.alpha) * m.rho.powf(b / d),
            m.alpha,
            m.rho.powf(a / d),
        );
        let edge = if m.alpha == 0.0 || beta == 0.0 {
            1.0
        } else {
            (1.0 + beta / (start as f64 + 1.0)).powf(m.alpha)
        };
        (base, edge)
    };
    match ph {
        Phase::Zero => Phase::Zero,
        Phase::Exact(m) => {
            let (base, edge) = sub(m);
            if edge == 1.0 {
                Phase::Exact(base)
            } else {
                Phase::Bounded {
                    lo: base.abs().scale(edge.min(1.0)),
                    hi: Some(base.abs().scale(edge.max(1.0))),
                }
            }
        }
        Phase::Bounded { lo, hi } => {
            let (lb, le) = sub(lo);
            Phase::Bounded {
                lo: lb.abs().scale(le.min(1.0)),
                hi: hi.map(|h| {
                    let (hb, he) = sub(&h);
                    hb.abs().scale(he.max(1.0))
                }),
            }
        }
    }
}
