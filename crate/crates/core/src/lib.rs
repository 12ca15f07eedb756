//! Orlicz-space numerics on discrete measure spaces.
//!
//! The crate covers Young functions and their conjugates, finite and
//! truncated-countable measure spaces, modular/Luxemburg/Orlicz norms, and
//! composition operators `f ↦ f∘φ` together with their domains, adjoints and
//! boundedness. Every statement about a σ-algebra becomes a statement about a
//! partition of atoms, and quantities that depend on an infinite tail are
//! either certified in closed form or reported as inconclusive.

pub mod adjoint;
pub mod compop;
pub mod error;
pub mod gen;
pub mod lp;
pub mod measure;
pub mod norms;
pub mod tail;
pub mod verdict;
pub mod young;

pub use error::{Error, Result};
pub use measure::{AtomSet, MapLaw, MeasureSpace, Partition, SimpleFunction, Transformation, WeightLaw};
pub use norms::{NormMethod, NormResult};
pub use tail::{Monomial, Phase, TailLaw, TailSum};
pub use verdict::{Decision, Verdict};
pub use young::{Extension, GrowthStatus, GrowthVerdict, ProbeRange, YoungFunction};

/// Product with the measure-theoretic convention `0·∞ = 0`.
#[inline]
pub fn mul0(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// Relative closeness used by the self-checks scattered through the crate.
#[inline]
pub fn close(a: f64, b: f64, rel: f64) -> bool {
    if a == b {
        return true;
    }
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
