use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Behaviour of a piecewise-linear Young function past its last breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extension {
    /// Continue linearly with this slope.
    Slope(f64),
    /// `+∞` beyond the last breakpoint.
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PiecewiseRepr {
    breakpoints: Vec<[f64; 2]>,
    extension: Extension,
}

/// Convex piecewise-linear function on `[0, ∞)` through `(0, 0)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PiecewiseRepr", into = "PiecewiseRepr")]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    vs: Vec<f64>,
    slopes: Vec<f64>,
    ext: Extension,
    /// The function this one is the conjugate of; conjugating again returns it.
    dual: Option<Box<PiecewiseLinear>>,
}

impl PartialEq for PiecewiseLinear {
    fn eq(&self, other: &Self) -> bool {
        self.xs == other.xs && self.vs == other.vs && self.slopes == other.slopes && self.ext == other.ext
    }
}

impl TryFrom<PiecewiseRepr> for PiecewiseLinear {
    type Error = Error;

    fn try_from(r: PiecewiseRepr) -> Result<Self> {
        PiecewiseLinear::new(r.breakpoints.iter().map(|b| (b[0], b[1])).collect(), r.extension)
    }
}

impl From<PiecewiseLinear> for PiecewiseRepr {
    fn from(p: PiecewiseLinear) -> Self {
        PiecewiseRepr {
            breakpoints: p.xs.iter().zip(&p.vs).map(|(x, v)| [*x, *v]).collect(),
            extension: p.ext,
        }
    }
}

impl PiecewiseLinear {
    pub fn new(breakpoints: Vec<(f64, f64)>, ext: Extension) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidYoung(format!("piecewise: {m}")));
        if breakpoints.is_empty() {
            return bad("at least the breakpoint (0, 0) is required");
        }
        if breakpoints[0] != (0.0, 0.0) {
            return bad("first breakpoint must be (0, 0)");
        }
        if breakpoints.iter().any(|(x, v)| !x.is_finite() || !v.is_finite()) {
            return bad("breakpoints must be finite");
        }
        let (xs, vs): (Vec<f64>, Vec<f64>) = breakpoints.into_iter().unzip();
        let mut slopes = Vec::with_capacity(xs.len().saturating_sub(1));
        for i in 1..xs.len() {
            if xs[i] <= xs[i - 1] {
                return bad("breakpoint abscissae must be strictly increasing");
            }
            slopes.push((vs[i] - vs[i - 1]) / (xs[i] - xs[i - 1]));
        }
        let eps = 1e-12;
        for (i, s) in slopes.iter().enumerate() {
            if *s < -eps {
                return bad("slopes must be nonnegative");
            }
            if i > 0 && *s < slopes[i - 1] - eps * slopes[i - 1].abs().max(1.0) {
                return bad("slopes must be nondecreasing (convexity)");
            }
        }
        let last = slopes.last().copied().unwrap_or(0.0);
        match ext {
            Extension::Slope(s) => {
                if !s.is_finite() || s < last - eps * last.max(1.0) {
                    return bad("extension slope must be finite and at least the last slope");
                }
                if s <= 0.0 {
                    return bad("extension slope must be positive so that the function is unbounded");
                }
            }
            Extension::Infinite => {
                if xs.len() == 1 {
                    return bad("infinite extension needs a breakpoint beyond 0");
                }
            }
        }
        Ok(PiecewiseLinear { xs, vs, slopes, ext, dual: None })
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.vs.iter().copied())
    }

    pub fn extension(&self) -> Extension {
        self.ext
    }

    fn last(&self) -> (f64, f64) {
        (*self.xs.last().unwrap(), *self.vs.last().unwrap())
    }

    /// Sup of the finite domain.
    pub fn domain_end(&self) -> f64 {
        match self.ext {
            Extension::Slope(_) => f64::INFINITY,
            Extension::Infinite => self.last().0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.abs();
        let (xk, vk) = self.last();
        if x >= xk {
            return match self.ext {
                Extension::Slope(s) => vk + s * (x - xk),
                Extension::Infinite if x == xk => vk,
                Extension::Infinite => f64::INFINITY,
            };
        }
        // xs[i] <= x < xs[i+1]
        let i = self.xs.partition_point(|b| *b <= x) - 1;
        self.vs[i] + self.slopes[i] * (x - self.xs[i])
    }

    /// One-sided derivatives `(left, right)` at `x ≥ 0`; `left(0) = 0`.
    pub fn derivatives(&self, x: f64) -> (f64, f64) {
        let (xk, _) = self.last();
        let slope_after = |i: usize| -> f64 {
            if i < self.slopes.len() {
                self.slopes[i]
            } else {
                match self.ext {
                    Extension::Slope(s) => s,
                    Extension::Infinite => f64::INFINITY,
                }
            }
        };
        if x > xk {
            let s = slope_after(self.slopes.len());
            return (s, s);
        }
        match self.xs.binary_search_by(|b| b.total_cmp(&x)) {
            Ok(i) => {
                let left = if i == 0 { 0.0 } else { self.slopes[i - 1] };
                (left, slope_after(i))
            }
            Err(j) => {
                let s = self.slopes[j - 1];
                (s, s)
            }
        }
    }

    /// `inf{x ≥ 0 : Φ(x) > y}`; flat stretches resolve to their right end.
    pub fn generalized_inverse(&self, y: f64) -> f64 {
        if y.is_infinite() {
            return self.domain_end();
        }
        let i = self.vs.partition_point(|v| *v <= y);
        if i < self.vs.len() {
            // vs[i-1] <= y < vs[i]; the slope on that segment is positive
            return self.xs[i - 1] + (y - self.vs[i - 1]) / self.slopes[i - 1];
        }
        let (xk, vk) = self.last();
        match self.ext {
            Extension::Slope(s) => xk + (y - vk) / s,
            Extension::Infinite => xk,
        }
    }

    /// Exact Legendre transform: slopes become abscissae and vice versa.
    pub fn conjugate(&self) -> PiecewiseLinear {
        if let Some(d) = &self.dual {
            return (**d).clone();
        }
        let mut out = self.legendre();
        out.dual = Some(Box::new(self.clone()));
        out
    }

    /// The breakpoint transform itself, without the memo.
    pub fn legendre(&self) -> PiecewiseLinear {
        let mut bps: Vec<(f64, f64)> = vec![(0.0, 0.0)];
        let mut last_y = 0.0;
        for (j, s) in self.slopes.iter().enumerate() {
            if *s > last_y {
                bps.push((*s, self.xs[j] * s - self.vs[j]));
                last_y = *s;
            }
        }
        let (xk, vk) = self.last();
        let ext = match self.ext {
            Extension::Infinite => Extension::Slope(xk),
            Extension::Slope(se) => {
                if se > last_y {
                    bps.push((se, xk * se - vk));
                }
                Extension::Infinite
            }
        };
        PiecewiseLinear::new(bps, ext).expect("conjugate of a valid piecewise function is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hinge() -> PiecewiseLinear {
        // max(0, x − 1)
        PiecewiseLinear::new(vec![(0.0, 0.0), (1.0, 0.0)], Extension::Slope(1.0)).unwrap()
    }

    #[test]
    fn rejects_nonconvex_and_bad_origin() {
        assert!(PiecewiseLinear::new(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 3.0)], Extension::Slope(1.0)).is_err());
        assert!(PiecewiseLinear::new(vec![(0.0, 1.0)], Extension::Slope(1.0)).is_err());
        assert!(PiecewiseLinear::new(vec![(0.0, 0.0)], Extension::Infinite).is_err());
        assert!(PiecewiseLinear::new(vec![(0.0, 0.0), (1.0, 0.0)], Extension::Slope(0.0)).is_err());
    }

    #[test]
    fn inverse_of_flat_segment_is_right_end() {
        assert_eq!(hinge().generalized_inverse(0.0), 1.0);
        assert_eq!(hinge().generalized_inverse(2.0), 3.0);
    }

    #[test]
    fn conjugate_of_abs_conjugate_is_abs() {
        let abs_conj = PiecewiseLinear::new(vec![(0.0, 0.0), (1.0, 0.0)], Extension::Infinite).unwrap();
        let back = abs_conj.conjugate();
        assert_eq!(back, PiecewiseLinear::new(vec![(0.0, 0.0)], Extension::Slope(1.0)).unwrap());
        assert_eq!(back.conjugate(), abs_conj);
    }

    #[test]
    fn double_conjugate_is_exact_at_breakpoints() {
        let f = PiecewiseLinear::new(vec![(0.0, 0.0), (0.25, 0.125), (4.0, 10.0)], Extension::Slope(7.5)).unwrap();
        let back = f.conjugate().conjugate();
        for (x, v) in f.breakpoints() {
            assert_eq!(back.eval(x), v);
        }
        let raw = f.legendre().legendre();
        for (x, v) in f.breakpoints() {
            assert!((raw.eval(x) - v).abs() <= 1e-12 * v.max(1.0));
        }
    }

    #[test]
    fn conjugate_matches_brute_force_sup() {
        let f = PiecewiseLinear::new(
            vec![(0.0, 0.0), (1.0, 0.5), (2.0, 2.0), (4.0, 7.0)],
            Extension::Slope(4.0),
        )
        .unwrap();
        let g = f.conjugate();
        for k in 0..=40 {
            let y = k as f64 * 0.1;
            let brute = (0..=8000)
                .map(|i| i as f64 * 0.001)
                .map(|x| x * y - f.eval(x))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((g.eval(y) - brute).abs() < 1e-9, "y={y}: {} vs {brute}", g.eval(y));
        }
        assert_eq!(g.eval(4.5), f64::INFINITY);
    }
}
