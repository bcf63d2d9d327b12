//! Entropy-compressed searchable partial sums.
//!
//! The sequence lives in an [`FvStore`]; everything else is small and sampled
//! on the store's block grid (`block_len` = `l` symbols per block, `m` =
//! `superblock_blocks` blocks per superblock):
//!
//! * [`SumIndex`]: absolute sums every `l * m` elements and sums relative to
//!   the superblock every `l` elements. `sum(i)` adds the two samples and a
//!   [`UniversalSumTable`] lookup for the first `i mod l` symbols of the block.
//! * [`SearchIndex`]: `search` values at every multiple of
//!   `t_big = sigma * ceil(lg n)^2` of the argument, plus, at every multiple of
//!   `t_small = l`, the difference to the preceding `t_big` sample. For
//!   `j0 = l * floor(j / l)` this yields `p0 = search(j0)` in two lookups.
//!   Because every element is at least 1 and `j - j0 < l`, the answer lies in
//!   the `l` symbols starting at `p0`, so one extracted key and one
//!   [`UniversalSearchTable`] lookup with `q = j - sum(p0 - 1) - 1` finish it.

use crate::bitvector::{bits_for, IntVector};
use crate::error::{check_range, Error, Result};
use crate::fv::{ceil_lg, table_cap_from_env, FvParams, FvStore};

use super::{require_positive, Backend, PartialSums, SpaceBreakdown};

/// `(key, r) -> sum of the first r symbols of key`, for every possible key.
#[derive(Clone, Debug)]
pub struct UniversalSumTable {
    stride: usize,
    entries: IntVector,
}

impl UniversalSumTable {
    pub fn build(params: &FvParams) -> Self {
        let l = params.block_len;
        let width = bits_for(params.sym_mask() * l as u64);
        let mut entries = IntVector::new(width);
        for key in 0..=params.key_mask() {
            let mut acc = 0u64;
            entries.push(0);
            for t in 0..l {
                acc += params.symbol(key, t) as u64;
                entries.push(acc);
            }
        }
        UniversalSumTable {
            stride: l + 1,
            entries,
        }
    }

    #[inline]
    pub fn get(&self, key: u64, r: usize) -> u64 {
        self.entries.get(key as usize * self.stride + r)
    }

    pub fn size_in_bits(&self) -> u64 {
        self.entries.size_in_bits()
    }
}

/// `(key, q) -> largest t <= l with (sum of the first t symbols) <= q`,
/// for every key and `0 <= q <= sigma * l`.
#[derive(Clone, Debug)]
pub struct UniversalSearchTable {
    stride: usize,
    entries: IntVector,
}

impl UniversalSearchTable {
    pub fn build(params: &FvParams, sigma: u32) -> Self {
        let l = params.block_len;
        let q_max = sigma as usize * l;
        let mut entries = IntVector::new(bits_for(l as u64));
        let mut prefix = vec![0u64; l + 1];
        for key in 0..=params.key_mask() {
            for t in 0..l {
                prefix[t + 1] = prefix[t] + params.symbol(key, t) as u64;
            }
            let mut t = 0;
            for q in 0..=q_max as u64 {
                while t < l && prefix[t + 1] <= q {
                    t += 1;
                }
                entries.push(t as u64);
            }
        }
        UniversalSearchTable {
            stride: q_max + 1,
            entries,
        }
    }

    #[inline]
    pub fn get(&self, key: u64, q: u64) -> usize {
        debug_assert!((q as usize) < self.stride);
        self.entries.get(key as usize * self.stride + q as usize) as usize
    }

    pub fn q_max(&self) -> u64 {
        self.stride as u64 - 1
    }

    pub fn size_in_bits(&self) -> u64 {
        self.entries.size_in_bits()
    }
}

/// Sampled sums on the block grid.
#[derive(Clone, Debug)]
pub struct SumIndex {
    superblock_sums: IntVector,
    block_sums: IntVector,
}

impl SumIndex {
    fn build(prefix: &[u64], params: &FvParams, sigma: u32) -> Self {
        let n = prefix.len() - 1;
        let l = params.block_len;
        let m = params.superblock_blocks;
        let nblocks = n.div_ceil(l);
        let span = (l * m) as u64;
        let mut superblock_sums = IntVector::new(bits_for(prefix[n]));
        let mut block_sums = IntVector::new(bits_for((sigma as u64 - 1) * span));
        for b in 0..=nblocks {
            let at = (b * l).min(n);
            if b % m == 0 {
                superblock_sums.push(prefix[at]);
            }
            block_sums.push(prefix[at] - prefix[(b / m * m * l).min(n)]);
        }
        SumIndex {
            superblock_sums,
            block_sums,
        }
    }

    /// Sum of every element before block `b`.
    #[inline]
    fn before_block(&self, b: usize, m: usize) -> u64 {
        self.superblock_sums.get(b / m) + self.block_sums.get(b)
    }

    pub fn superblock_sum(&self, c: usize) -> u64 {
        self.superblock_sums.get(c)
    }

    pub fn superblocks(&self) -> usize {
        self.superblock_sums.len()
    }

    pub fn size_in_bits(&self) -> u64 {
        self.superblock_sums.size_in_bits() + self.block_sums.size_in_bits()
    }
}

/// Coarse and fine `search` samples.
#[derive(Clone, Debug)]
pub struct SearchIndex {
    big: u64,
    small: u64,
    coarse: IntVector,
    fine: IntVector,
}

impl SearchIndex {
    fn build(prefix: &[u64], big: u64, small: u64) -> Self {
        let n = prefix.len() - 1;
        let u = prefix[n];
        // search(j) for non-decreasing j, by a forward-moving pointer.
        let mut p = 0usize;
        let mut search = |j: u64| {
            while prefix[p] < j {
                p += 1;
            }
            p as u64
        };
        let mut coarse_values = Vec::with_capacity((u / big) as usize + 1);
        let mut fine_values = Vec::with_capacity((u / small) as usize + 1);
        let mut next_big = 0u64;
        for d in 0..=u / small {
            let j0 = d * small;
            // Big samples interleave with small ones in increasing j.
            while next_big <= j0 {
                coarse_values.push(search(next_big));
                next_big += big;
            }
            let s = search(j0);
            fine_values.push(s - coarse_values[(j0 / big) as usize]);
        }
        while next_big <= u {
            coarse_values.push(search(next_big));
            next_big += big;
        }
        SearchIndex {
            big,
            small,
            coarse: IntVector::from_values_with_width(&coarse_values, bits_for(n as u64)),
            fine: IntVector::from_values_with_width(&fine_values, bits_for(big)),
        }
    }

    /// `search(j0)` for a multiple `j0` of the fine step.
    #[inline]
    fn sampled(&self, j0: u64) -> usize {
        (self.coarse.get((j0 / self.big) as usize) + self.fine.get((j0 / self.small) as usize))
            as usize
    }

    pub fn coarse_step(&self) -> u64 {
        self.big
    }

    pub fn fine_step(&self) -> u64 {
        self.small
    }

    pub fn coarse(&self) -> impl Iterator<Item = u64> + '_ {
        self.coarse.iter()
    }

    pub fn fine(&self) -> impl Iterator<Item = u64> + '_ {
        self.fine.iter()
    }

    pub fn size_in_bits(&self) -> u64 {
        self.coarse.size_in_bits() + self.fine.size_in_bits()
    }
}

/// Searchable partial sums in compressed space with constant-time queries.
#[derive(Clone, Debug)]
pub struct EntropySums {
    store: FvStore,
    total: u64,
    sum_index: SumIndex,
    search_index: SearchIndex,
    sum_table: UniversalSumTable,
    search_table: UniversalSearchTable,
    /// `pad_keys[m]`: the symbol `sigma - 1` in every slot from `m` on.
    pad_keys: Vec<u64>,
}

impl EntropySums {
    /// Builds with the key-width cap from the environment (default 24 bits).
    pub fn build(seq: &[u32], sigma: u32) -> Result<Self> {
        Self::build_with_cap(seq, sigma, table_cap_from_env())
    }

    pub fn build_with_cap(seq: &[u32], sigma: u32, table_cap: u32) -> Result<Self> {
        require_positive(seq)?;
        if sigma < 2 && !seq.is_empty() {
            return Err(Error::invalid("alphabet size must exceed the largest value"));
        }
        let store = FvStore::build_with_cap(seq, sigma, table_cap)?;
        Ok(Self::index(store, seq))
    }

    /// Wraps an existing store, rebuilding every derived index.
    pub fn from_store(store: FvStore) -> Result<Self> {
        let seq = store.decode();
        require_positive(&seq).map_err(|e| Error::format(e.to_string()))?;
        Ok(Self::index(store, &seq))
    }

    fn index(store: FvStore, seq: &[u32]) -> Self {
        let params = *store.params();
        let sigma = store.sigma().max(2);
        let mut prefix = Vec::with_capacity(seq.len() + 1);
        prefix.push(0u64);
        for &x in seq {
            prefix.push(prefix.last().unwrap() + x as u64);
        }
        let lg_n = ceil_lg(seq.len()).max(1) as u64;
        let big = sigma as u64 * lg_n * lg_n;
        let small = params.block_len as u64;

        let l = params.block_len;
        let pad_sym = (sigma - 1) as u64;
        let pad_keys = (0..=l)
            .map(|m| {
                (m..l).fold(0u64, |key, t| key | pad_sym << (t as u32 * params.sym_bits))
            })
            .collect();

        EntropySums {
            total: prefix[seq.len()],
            sum_index: SumIndex::build(&prefix, &params, sigma),
            search_index: SearchIndex::build(&prefix, big, small),
            sum_table: UniversalSumTable::build(&params),
            search_table: UniversalSearchTable::build(&params, sigma),
            pad_keys,
            store,
        }
    }

    pub fn store(&self) -> &FvStore {
        &self.store
    }

    pub fn params(&self) -> &FvParams {
        self.store.params()
    }

    pub fn sigma(&self) -> u32 {
        self.store.sigma()
    }

    pub fn sum_index(&self) -> &SumIndex {
        &self.sum_index
    }

    pub fn search_index(&self) -> &SearchIndex {
        &self.search_index
    }

    pub fn sum_table(&self) -> &UniversalSumTable {
        &self.sum_table
    }

    pub fn search_table(&self) -> &UniversalSearchTable {
        &self.search_table
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.store.decode()
    }

    #[inline]
    fn sum_unchecked(&self, i: usize) -> u64 {
        let p = self.store.params();
        let b = i / p.block_len;
        let r = i % p.block_len;
        let base = self.sum_index.before_block(b, p.superblock_blocks);
        if r == 0 {
            base
        } else {
            base + self.sum_table.get(self.store.block_key(b), r)
        }
    }

    /// `block_len` symbols from 0-based `pos`, padded with `sigma - 1` past the end.
    #[inline]
    fn padded_key(&self, pos: usize) -> u64 {
        let key = self.store.key_at(pos);
        let l = self.store.params().block_len;
        let n = self.store.len();
        if pos + l <= n {
            key
        } else {
            let valid = n - pos;
            let keep = (1u64 << (valid as u32 * self.store.params().sym_bits)) - 1;
            (key & keep) | self.pad_keys[valid]
        }
    }

    #[inline]
    fn search_unchecked(&self, j: u64) -> usize {
        let small = self.search_index.small;
        let j0 = j - j % small;
        let p0 = self.search_index.sampled(j0);
        if j0 == j {
            return p0;
        }
        // p0 == 0 only for j0 == 0; the answer is then found from element 1.
        let p = p0.max(1);
        let q = j - self.sum_unchecked(p - 1) - 1;
        p + self.search_table.get(self.padded_key(p - 1), q)
    }
}

impl PartialSums for EntropySums {
    fn len(&self) -> usize {
        self.store.len()
    }

    fn total(&self) -> u64 {
        self.total
    }

    #[inline]
    fn sum(&self, i: usize) -> Result<u64> {
        check_range("sum argument", i as u64, 0, self.store.len() as u64)?;
        Ok(self.sum_unchecked(i))
    }

    #[inline]
    fn search(&self, j: u64) -> Result<usize> {
        check_range("search argument", j, 1, self.total)?;
        Ok(self.search_unchecked(j))
    }

    fn space_breakdown(&self) -> SpaceBreakdown {
        let fv = self.store.space();
        SpaceBreakdown {
            payload_bits: fv.payload_bits,
            pointer_bits: fv.pointer_bits + fv.codebook_bits,
            sum_index_bits: self.sum_index.size_in_bits(),
            search_index_bits: self.search_index.size_in_bits(),
            table_bits: self.sum_table.size_in_bits() + self.search_table.size_in_bits(),
        }
    }

    fn backend(&self) -> Backend {
        Backend::Entropy
    }
}
