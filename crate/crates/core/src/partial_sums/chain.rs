use crate::bitvector::{BitVector, BitVectorBuilder};
use crate::error::{check_range, Error, Result};

use super::{Backend, PartialSums, SpaceBreakdown};

/// Degenerate wavelet tree: level `l` (1-based) holds one bit per element that
/// reached it, 0 when the element equals `l` and 1 when it continues to level
/// `l + 1`. Zeros continue through every level and contribute nothing.
#[derive(Clone, Debug)]
pub struct ChainSums {
    levels: Vec<BitVector>,
    n: usize,
    total: u64,
}

/// One level visited by [`ChainSums::sum_trace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelStep {
    pub level: u32,
    /// Prefix length queried at this level.
    pub position: usize,
    /// `rank0` at that prefix: elements equal to `level`.
    pub zeros: usize,
}

impl ChainSums {
    pub fn build(seq: &[u32], sigma: u32) -> Result<Self> {
        if let Some(bad) = seq.iter().find(|&&x| x >= sigma) {
            return Err(Error::invalid(format!(
                "symbol {bad} outside alphabet [0, {sigma})"
            )));
        }
        let mut levels = Vec::with_capacity(sigma.saturating_sub(1) as usize);
        let mut current: Vec<u32> = seq.to_vec();
        for level in 1..sigma {
            let mut builder = BitVectorBuilder::with_capacity(current.len());
            for &x in &current {
                builder.push(x != level);
            }
            current.retain(|&x| x != level);
            levels.push(builder.build());
        }
        Self::from_levels(levels, seq.len())
    }

    pub(crate) fn from_levels(levels: Vec<BitVector>, n: usize) -> Result<Self> {
        let mut expected = n;
        for (l, level) in levels.iter().enumerate() {
            if level.len() != expected {
                return Err(Error::format(format!(
                    "chain level {} has {} bits, expected {expected}",
                    l + 1,
                    level.len()
                )));
            }
            expected = level.count_ones();
        }
        let total = levels
            .iter()
            .enumerate()
            .map(|(l, level)| (l as u64 + 1) * (level.len() - level.count_ones()) as u64)
            .sum();
        Ok(ChainSums { levels, n, total })
    }

    pub fn levels(&self) -> &[BitVector] {
        &self.levels
    }

    pub fn sigma(&self) -> u32 {
        self.levels.len() as u32 + 1
    }

    /// `sum(i)` with the per-level positions and zero counts it used.
    pub fn sum_trace(&self, i: usize) -> Result<(u64, Vec<LevelStep>)> {
        check_range("sum argument", i as u64, 0, self.n as u64)?;
        let mut steps = Vec::with_capacity(self.levels.len());
        let mut pos = i;
        let mut total = 0;
        for (l, level) in self.levels.iter().enumerate() {
            let zeros = level.rank0_unchecked(pos);
            steps.push(LevelStep {
                level: l as u32 + 1,
                position: pos,
                zeros,
            });
            total += (l as u64 + 1) * zeros as u64;
            pos -= zeros;
        }
        Ok((total, steps))
    }

    #[inline]
    fn sum_unchecked(&self, i: usize) -> u64 {
        let mut pos = i;
        let mut total = 0;
        for (l, level) in self.levels.iter().enumerate() {
            if pos == 0 {
                break;
            }
            let ones = level.rank1_unchecked(pos);
            total += (l as u64 + 1) * (pos - ones) as u64;
            pos = ones;
        }
        total
    }

    pub fn to_vec(&self) -> Vec<u32> {
        (0..self.n)
            .map(|mut pos| {
                for (l, level) in self.levels.iter().enumerate() {
                    if !level.get(pos) {
                        return l as u32 + 1;
                    }
                    pos = level.rank1_unchecked(pos);
                }
                0
            })
            .collect()
    }
}

impl PartialSums for ChainSums {
    fn len(&self) -> usize {
        self.n
    }

    fn total(&self) -> u64 {
        self.total
    }

    #[inline]
    fn sum(&self, i: usize) -> Result<u64> {
        check_range("sum argument", i as u64, 0, self.n as u64)?;
        Ok(self.sum_unchecked(i))
    }

    /// Binary search over `sum`.
    fn search(&self, j: u64) -> Result<usize> {
        check_range("search argument", j, 1, self.total)?;
        let (mut lo, mut hi) = (1usize, self.n);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.sum_unchecked(mid) >= j {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(lo)
    }

    fn space_breakdown(&self) -> SpaceBreakdown {
        let (payload, index) = self.levels.iter().fold((0, 0), |(p, x), level| {
            let s = level.space();
            (p + s.payload_bits, x + s.index_bits)
        });
        SpaceBreakdown {
            payload_bits: payload,
            sum_index_bits: index,
            ..Default::default()
        }
    }

    fn backend(&self) -> Backend {
        Backend::Chain
    }
}
