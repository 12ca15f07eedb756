use serde::{Deserialize, Serialize};

use super::{MapLaw, MeasureSpace, SimpleFunction, Transformation};
use crate::error::{Error, Result};
use crate::tail::{Phase, TailLaw, TailSum};

/// How atoms past the explicit blocks are grouped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TailBlocks {
    /// No atoms beyond the blocks (finite spaces).
    Empty,
    Singletons,
    /// Consecutive runs of `size` atoms.
    Chunks { size: usize },
    /// Every tail atom belongs to `blocks[block]`.
    Join { block: usize },
    Unresolved { reason: String },
}

/// Partition of the atoms; realizes a sub-σ-algebra.
///
/// `blocks` partition the indices `0..prefix` (a `Join` target may list no
/// prefix atoms); atoms from `prefix` on follow `tail`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
    pub prefix: usize,
    pub tail: TailBlocks,
}

impl Partition {
    pub fn singletons(space: &MeasureSpace) -> Self {
        let n = space.len();
        Partition {
            blocks: (0..n).map(|i| vec![i]).collect(),
            prefix: n,
            tail: if space.is_countable() { TailBlocks::Singletons } else { TailBlocks::Empty },
        }
    }

    /// Explicit blocks over the prefix; countable tails become singletons.
    pub fn from_blocks(space: &MeasureSpace, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let prefix = blocks.iter().map(|b| b.len()).sum::<usize>();
        let mut seen = vec![false; prefix];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &i in b {
                if i >= prefix || std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidPartition(format!("atom index {i} repeated or out of range")));
                }
            }
        }
        if !space.is_countable() && prefix != space.len() {
            return Err(Error::InvalidPartition("blocks must cover every atom".into()));
        }
        let tail = if space.is_countable() { TailBlocks::Singletons } else { TailBlocks::Empty };
        Ok(Partition { blocks, prefix, tail })
    }

    /// Index of the block containing atom `i`, when `i` is in the prefix.
    pub fn block_of(&self, i: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&i))
    }

    /// Whether `f` is constant on every prefix block.
    pub fn measurable(&self, f: &SimpleFunction) -> bool {
        self.blocks.iter().all(|b| {
            let vals: Vec<Option<f64>> = b.iter().map(|i| f.at(*i)).collect();
            vals.windows(2).all(|w| w[0].is_some() && w[0] == w[1])
        })
    }
}

impl MeasureSpace {
    /// Fibers `φ⁻¹({y})`: the partition generating `φ⁻¹(Σ)`.
    pub fn fiber_partition(&self, phi: &Transformation) -> Result<Partition> {
        phi.validate(self)?;
        let group = |n: usize| -> (Vec<Vec<usize>>, Vec<usize>) {
            let mut order: Vec<usize> = Vec::new();
            let mut by_target: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
            for i in 0..n {
                let t = phi.target(i);
                by_target.entry(t).or_default().push(i);
            }
            let mut blocks = Vec::new();
            for (t, b) in by_target {
                order.push(t);
                blocks.push(b);
            }
            (blocks, order)
        };
        if !self.is_countable() {
            let (blocks, _) = group(self.len());
            return Ok(Partition { blocks, prefix: self.len(), tail: TailBlocks::Empty });
        }
        let law = phi.law();
        if let MapLaw::Constant { m } = law {
            let prefix = phi.targets.len().max(self.len());
            let (mut blocks, order) = group(prefix);
            let target = m as usize - 1;
            let block = match order.iter().position(|t| *t == target) {
                Some(k) => k,
                None => {
                    blocks.push(vec![]);
                    blocks.len() - 1
                }
            };
            return Ok(Partition { blocks, prefix, tail: TailBlocks::Join { block } });
        }
        let tail = match &law {
            l if l.is_injective() => TailBlocks::Singletons,
            MapLaw::Divide { k } => TailBlocks::Chunks { size: *k as usize },
            l => {
                let (blocks, _) = group(self.len());
                return Ok(Partition {
                    blocks,
                    prefix: self.len(),
                    tail: TailBlocks::Unresolved { reason: format!("fibers of {l:?} have no closed form") },
                });
            }
        };
        let prefix = phi.separation(self.len() as u64, 0)? as usize;
        let (blocks, _) = group(prefix);
        Ok(Partition { blocks, prefix, tail })
    }

    /// `E^𝒜 f`: block averages of `f`.
    pub fn conditional_expectation(&self, f: &SimpleFunction, part: &Partition) -> Result<SimpleFunction> {
        let mut g = f.extended(part.prefix)?;
        let mut join_value = None;
        for (k, b) in part.blocks.iter().enumerate() {
            let mut num = 0.0;
            let mut den = 0.0;
            for &i in b {
                let w = self.weight(i);
                num += crate::mul0(g.values[i], w);
                den += w;
            }
            if let TailBlocks::Join { block } = part.tail {
                if block == k {
                    let mut tail = f.extended(part.prefix)?;
                    tail.values[..part.prefix].fill(0.0);
                    match self.mass_beyond(part.prefix) {
                        TailSum::Finite { lo, hi } if lo == hi => den += lo,
                        TailSum::Infinite => {
                            return Err(Error::Precondition(
                                "a block of infinite measure has no conditional expectation".into(),
                            ))
                        }
                        _ => return Err(Error::UnresolvedTail("measure of the joined block".into())),
                    }
                    num += self.integral(&tail)?;
                }
            }
            if num.is_nan() {
                return Err(Error::Divergent("block carries both +∞ and −∞".into()));
            }
            let avg = num / den;
            for &i in b {
                g.values[i] = avg;
            }
            if matches!(part.tail, TailBlocks::Join { block } if block == k) {
                join_value = Some(avg);
            }
        }
        match &part.tail {
            TailBlocks::Empty | TailBlocks::Singletons => Ok(g),
            TailBlocks::Join { .. } => {
                g.values.truncate(part.prefix);
                Ok(SimpleFunction::with_tail(g.values, TailLaw::constant(join_value.unwrap_or(0.0))))
            }
            TailBlocks::Chunks { size } => {
                let size = *size;
                let len = part.prefix + (g.len().saturating_sub(part.prefix)).div_ceil(size) * size;
                let mut g = g.extended(len)?;
                for start in (part.prefix..len).step_by(size) {
                    let idx = start..start + size;
                    let den: f64 = idx.clone().map(|i| self.weight(i)).sum();
                    let num: f64 = idx.clone().map(|i| crate::mul0(g.values[i], self.weight(i))).sum();
                    for i in idx {
                        g.values[i] = num / den;
                    }
                }
                let tail = match f.tail().as_ref() {
                    t if t.is_zero() => TailLaw::zero(),
                    TailLaw::Periodic { phases } if phases.len() == 1 => match phases[0] {
                        Phase::Exact(m) if m.alpha == 0.0 && m.rho == 1.0 => TailLaw::constant(m.c),
                        _ => TailLaw::unresolved("chunk averages of a non-constant tail"),
                    },
                    _ => TailLaw::unresolved("chunk averages of a non-constant tail"),
                };
                g.tail = Some(tail).filter(|t| !t.is_zero());
                Ok(g)
            }
            TailBlocks::Unresolved { reason } => Err(Error::UnresolvedTail(reason.clone())),
        }
    }
}
