use crate::bitvector::{BitVector, BitVectorBuilder};
use crate::error::{check_range, Error, Result};

use super::{require_positive, Backend, PartialSums, SpaceBreakdown};

/// Unary-gap bitvector: element `S[i]` becomes `S[i] - 1` zeros followed by
/// a one, so the `i`-th one sits at position `sum(i)`.
#[derive(Clone, Debug)]
pub struct MnSums {
    bits: BitVector,
    sigma: u32,
}

impl MnSums {
    pub fn build(seq: &[u32]) -> Result<Self> {
        require_positive(seq)?;
        let total: u64 = seq.iter().map(|&x| x as u64).sum();
        let mut builder = BitVectorBuilder::with_capacity(total as usize);
        for &x in seq {
            builder.push_run(false, x as usize - 1);
            builder.push(true);
        }
        let sigma = seq.iter().copied().max().unwrap_or(0) + 1;
        Ok(MnSums {
            bits: builder.build(),
            sigma,
        })
    }

    pub(crate) fn from_bits(bits: BitVector, sigma: u32) -> Result<Self> {
        if !bits.is_empty() && !bits.get(bits.len() - 1) {
            return Err(Error::format("unary encoding must end with a one"));
        }
        let sums = MnSums { bits, sigma };
        if sums.to_vec().iter().any(|&x| x >= sigma) {
            return Err(Error::format("stored values exceed the alphabet"));
        }
        Ok(sums)
    }

    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn to_vec(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len());
        let mut prev = 0;
        for i in 1..=self.len() {
            let p = self.bits.select1_unchecked(i);
            out.push((p - prev) as u32);
            prev = p;
        }
        out
    }
}

impl PartialSums for MnSums {
    fn len(&self) -> usize {
        self.bits.count_ones()
    }

    fn total(&self) -> u64 {
        self.bits.len() as u64
    }

    #[inline]
    fn sum(&self, i: usize) -> Result<u64> {
        check_range("sum argument", i as u64, 0, self.len() as u64)?;
        Ok(if i == 0 {
            0
        } else {
            self.bits.select1_unchecked(i) as u64
        })
    }

    #[inline]
    fn search(&self, j: u64) -> Result<usize> {
        check_range("search argument", j, 1, self.total())?;
        Ok(self.bits.rank1_unchecked(j as usize - 1) + 1)
    }

    fn space_breakdown(&self) -> SpaceBreakdown {
        // select1 (sum) walks the samples and the rank counts; rank1 (search)
        // only the counts. The counts are charged to search.
        let index = self.bits.index();
        SpaceBreakdown {
            payload_bits: self.bits.len() as u64,
            sum_index_bits: index.select_bits(),
            search_index_bits: index.rank_bits(),
            ..Default::default()
        }
    }

    fn backend(&self) -> Backend {
        Backend::Mn
    }
}
