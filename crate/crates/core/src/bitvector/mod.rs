//! Plain bit vectors with a sampled rank/select directory.
//!
//! Positions are 1-based: `access(i)` is defined for `1 <= i <= len`,
//! `rank1(i)` counts the ones among the first `i` bits (so `rank1(0) == 0`),
//! and `select1(r)` returns the position of the `r`-th one.
//!
//! The directory stores an absolute count every [`SUPERBLOCK_BITS`] bits, a
//! count relative to the enclosing superblock every [`BLOCK_BITS`] bits, and
//! the position of every [`SELECT_SAMPLE`]-th one. Rank is two lookups and a
//! popcount; select jumps to the sample, binary searches the superblocks up to
//! the next sample, scans at most eight block counts and finishes in the word.

mod int_vector;

use std::io::{Read, Write};

pub use int_vector::{bits_for, IntVector};
pub(crate) use int_vector::{read_bits, write_bits};

use crate::error::{check_range, Error, Result};
use crate::io;

pub const SUPERBLOCK_BITS: usize = 512;
pub const BLOCK_BITS: usize = 64;
pub const SELECT_SAMPLE: usize = 4096;

const BLOCKS_PER_SUPERBLOCK: usize = SUPERBLOCK_BITS / BLOCK_BITS;
const MAGIC: &[u8; 4] = b"WBV1";

/// Sampled rank/select directory over a [`BitVector`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RankSelectIndex {
    /// `superblock_ranks[c]` = ones in the first `c * SUPERBLOCK_BITS` bits.
    superblock_ranks: Vec<u64>,
    /// Ones from the start of the enclosing superblock to the start of each word.
    block_ranks: Vec<u16>,
    /// 0-based position of the `(c * SELECT_SAMPLE + 1)`-th one.
    select_samples: Vec<u64>,
    ones: usize,
}

impl RankSelectIndex {
    fn build(words: &[u64], len: usize) -> Self {
        let nwords = len.div_ceil(BLOCK_BITS);
        let mut superblock_ranks = Vec::with_capacity(nwords / BLOCKS_PER_SUPERBLOCK + 1);
        // One entry past the last word so that rank(len) needs no special case.
        let mut block_ranks = Vec::with_capacity(nwords + 1);
        let mut select_samples = Vec::new();

        let mut ones = 0usize;
        let mut sb_start = 0usize;
        for w in 0..=nwords {
            if w % BLOCKS_PER_SUPERBLOCK == 0 {
                superblock_ranks.push(ones as u64);
                sb_start = ones;
            }
            block_ranks.push((ones - sb_start) as u16);
            if w == nwords {
                break;
            }
            let word = words[w];
            let count = word.count_ones() as usize;
            // Sample every one whose 0-based rank is a multiple of SELECT_SAMPLE.
            let mut next = select_samples.len() * SELECT_SAMPLE;
            while next < ones + count {
                let k = (next - ones) as u32;
                select_samples.push((w * BLOCK_BITS) as u64 + select_in_word(word, k) as u64);
                next += SELECT_SAMPLE;
            }
            ones += count;
        }

        RankSelectIndex {
            superblock_ranks,
            block_ranks,
            select_samples,
            ones,
        }
    }

    pub fn size_in_bits(&self) -> u64 {
        self.rank_bits() + self.select_bits()
    }

    /// Superblock and block counts.
    pub fn rank_bits(&self) -> u64 {
        self.superblock_ranks.len() as u64 * 64 + self.block_ranks.len() as u64 * 16
    }

    pub fn select_bits(&self) -> u64 {
        self.select_samples.len() as u64 * 64
    }
}

/// Bits of storage used by a bit vector, split into raw bits and directory.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BitVectorSpace {
    pub payload_bits: u64,
    pub index_bits: u64,
}

impl BitVectorSpace {
    pub fn total(&self) -> u64 {
        self.payload_bits + self.index_bits
    }
}

/// An immutable bit array with constant-time rank and select.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitVector {
    /// Always one zero word longer than needed, see [`read_bits`].
    words: Vec<u64>,
    len: usize,
    index: RankSelectIndex,
}

impl Default for BitVector {
    fn default() -> Self {
        BitVector::from_words(Vec::new(), 0)
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut builder = BitVectorBuilder::new();
        for bit in iter {
            builder.push(bit);
        }
        builder.build()
    }
}

impl BitVector {
    /// Builds from LSB-first words; bits at or beyond `len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        let nwords = len.div_ceil(BLOCK_BITS);
        words.resize(nwords + 1, 0);
        if !len.is_multiple_of(BLOCK_BITS) {
            words[nwords - 1] &= (1u64 << (len % BLOCK_BITS)) - 1;
        }
        let index = RankSelectIndex::build(&words, len);
        BitVector { words, len, index }
    }

    /// Parses a string of `0`/`1` characters, mostly for tests.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("unexpected bit character {other:?}"))),
            })
            .collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Total number of ones.
    #[inline]
    pub fn count_ones(&self) -> usize {
        self.index.ones
    }

    pub fn index(&self) -> &RankSelectIndex {
        &self.index
    }

    pub fn access(&self, i: usize) -> Result<bool> {
        check_range("bit position", i as u64, 1, self.len as u64)?;
        Ok(self.get(i - 1))
    }

    /// 0-based unchecked access.
    #[inline]
    pub(crate) fn get(&self, pos: usize) -> bool {
        (self.words[pos >> 6] >> (pos & 63)) & 1 == 1
    }

    pub fn rank1(&self, i: usize) -> Result<usize> {
        check_range("rank argument", i as u64, 0, self.len as u64)?;
        Ok(self.rank1_unchecked(i))
    }

    pub fn rank0(&self, i: usize) -> Result<usize> {
        Ok(i - self.rank1(i)?)
    }

    #[inline]
    pub(crate) fn rank1_unchecked(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        let w = i >> 6;
        let partial = self.words[w] & ((1u64 << (i & 63)) - 1);
        self.index.superblock_ranks[i / SUPERBLOCK_BITS] as usize
            + self.index.block_ranks[w] as usize
            + partial.count_ones() as usize
    }

    #[inline]
    pub(crate) fn rank0_unchecked(&self, i: usize) -> usize {
        i - self.rank1_unchecked(i)
    }

    pub fn select1(&self, r: usize) -> Result<usize> {
        check_range("select rank", r as u64, 1, self.index.ones as u64)?;
        Ok(self.select1_unchecked(r))
    }

    /// Position (1-based) of the `r`-th one; requires `1 <= r <= count_ones()`.
    #[inline]
    pub(crate) fn select1_unchecked(&self, r: usize) -> usize {
        debug_assert!(r >= 1 && r <= self.index.ones);
        let idx = &self.index;
        let target = (r - 1) as u64; // ones strictly before the answer
        let s = (r - 1) / SELECT_SAMPLE;
        let mut lo = idx.select_samples[s] as usize / SUPERBLOCK_BITS;
        let mut hi = match idx.select_samples.get(s + 1) {
            Some(&p) => p as usize / SUPERBLOCK_BITS,
            None => idx.superblock_ranks.len() - 1,
        };
        // Last superblock whose absolute rank is <= target.
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if idx.superblock_ranks[mid] <= target {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let sb = lo;
        let rest = target - idx.superblock_ranks[sb];
        let first = sb * BLOCKS_PER_SUPERBLOCK;
        let last = (first + BLOCKS_PER_SUPERBLOCK).min(idx.block_ranks.len() - 1);
        let mut w = first;
        while w + 1 < last && (idx.block_ranks[w + 1] as u64) <= rest {
            w += 1;
        }
        let k = (rest - idx.block_ranks[w] as u64) as u32;
        w * BLOCK_BITS + select_in_word(self.words[w], k) as usize + 1
    }

    pub fn space(&self) -> BitVectorSpace {
        BitVectorSpace {
            payload_bits: self.len as u64,
            index_bits: self.index.size_in_bits(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |p| self.get(p))
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        io::write_magic(w, MAGIC)?;
        io::write_u64(w, self.len as u64)?;
        io::write_words(w, &self.words[..self.len.div_ceil(BLOCK_BITS)])
    }

    /// Reads the format written by [`write_to`](Self::write_to) and rebuilds the directory.
    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        io::read_magic(r, MAGIC)?;
        let len = io::read_usize(r)?;
        let words = io::read_words(r, len.div_ceil(BLOCK_BITS))?;
        Ok(BitVector::from_words(words, len))
    }
}

impl std::fmt::Display for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Appends bits one at a time.
#[derive(Debug, Default)]
pub struct BitVectorBuilder {
    words: Vec<u64>,
    len: usize,
}

impl BitVectorBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitVectorBuilder {
            words: Vec::with_capacity(bits.div_ceil(BLOCK_BITS) + 1),
            len: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(BLOCK_BITS) {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1u64 << (self.len % BLOCK_BITS);
        }
        self.len += 1;
    }

    /// Appends `count` copies of `bit`.
    pub fn push_run(&mut self, bit: bool, count: usize) {
        for _ in 0..count {
            self.push(bit);
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn build(self) -> BitVector {
        BitVector::from_words(self.words, self.len)
    }
}

/// 0-based position of the `k`-th (0-based) set bit of `word`.
#[inline]
pub(crate) fn select_in_word(word: u64, k: u32) -> u32 {
    debug_assert!(k < word.count_ones());
    let mut k = k;
    let mut base = 0u32;
    let mut w = word;
    // Skip whole bytes, then finish bit by bit.
    loop {
        let c = (w & 0xff).count_ones();
        if k < c {
            break;
        }
        k -= c;
        w >>= 8;
        base += 8;
    }
    for _ in 0..k {
        w &= w - 1;
    }
    base + w.trailing_zeros()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scan_rank(bits: &[bool], i: usize) -> usize {
        bits[..i].iter().filter(|&&b| b).count()
    }

    fn check_against_scan(bits: &[bool]) {
        let bv: BitVector = bits.iter().copied().collect();
        assert_eq!(bv.len(), bits.len());
        // Oracle: prefix counts and 1-based positions of ones, from one pass.
        let mut prefix = vec![0usize];
        let mut ones = Vec::new();
        for (p, &b) in bits.iter().enumerate() {
            prefix.push(prefix[p] + b as usize);
            if b {
                ones.push(p + 1);
            }
        }
        for (i, &expected) in prefix.iter().enumerate() {
            let r = bv.rank1(i).unwrap();
            assert_eq!(r, expected, "rank1({i})");
            assert_eq!(r + bv.rank0(i).unwrap(), i);
        }
        assert_eq!(bv.count_ones(), ones.len());
        for (k, &expected) in ones.iter().enumerate() {
            assert_eq!(bv.select1(k + 1).unwrap(), expected, "select1({})", k + 1);
        }
        for (p, &b) in bits.iter().enumerate() {
            assert_eq!(bv.access(p + 1).unwrap(), b);
        }
    }

    #[test]
    fn empty_vector() {
        let bv = BitVector::default();
        assert_eq!(bv.len(), 0);
        assert_eq!(bv.rank1(0).unwrap(), 0);
        assert!(bv.rank1(1).is_err());
        assert!(bv.select1(1).is_err());
        assert_eq!(bv.space().payload_bits, 0);
    }

    #[test]
    fn small_example() {
        let bv = BitVector::from_bit_str("101101").unwrap();
        assert_eq!(bv.len(), 6);
        assert_eq!(bv.rank1(0).unwrap(), 0);
        assert_eq!(bv.rank1(3).unwrap(), 2);
        assert_eq!(bv.rank1(6).unwrap(), 4);
        assert_eq!(bv.select1(1).unwrap(), 1);
        assert_eq!(bv.select1(4).unwrap(), 6);
        assert!(bv.select1(5).is_err());
        assert!(bv.select1(0).is_err());
        assert!(bv.rank1(7).is_err());
        assert!(bv.access(0).is_err());
        assert_eq!(bv.to_string(), "101101");
    }

    #[test]
    fn all_ones_selects_identity() {
        let bv: BitVector = std::iter::repeat_n(true, 10_000).collect();
        for r in 1..=10_000 {
            assert_eq!(bv.select1(r).unwrap(), r);
        }
    }

    #[test]
    fn random_vectors_match_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let len = rng.gen_range(0..=4096);
            let density: f64 = rng.gen();
            let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(density)).collect();
            check_against_scan(&bits);
        }
    }

    #[test]
    fn long_random_vector_matches_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let bits: Vec<bool> = (0..100_000).map(|_| rng.gen_bool(0.5)).collect();
        check_against_scan(&bits);
        // Sparse enough that select samples are far apart.
        let bits: Vec<bool> = (0..300_000).map(|_| rng.gen_bool(0.01)).collect();
        check_against_scan(&bits);
    }

    #[test]
    fn directory_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bits: Vec<bool> = (0..20_000).map(|_| rng.gen_bool(0.3)).collect();
        let bv: BitVector = bits.iter().copied().collect();
        for (c, &r) in bv.index.superblock_ranks.iter().enumerate() {
            let end = (c * SUPERBLOCK_BITS).min(bits.len());
            assert_eq!(r as usize, scan_rank(&bits, end));
        }
        let limit = 1u64 << bits_for(SUPERBLOCK_BITS as u64 - 1);
        assert!(bv.index.block_ranks.iter().all(|&b| (b as u64) < limit));
    }

    #[test]
    fn index_overhead() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut ratios = Vec::new();
        for exp in [18u32, 19, 20, 21] {
            let words: Vec<u64> = (0..(1usize << exp) / 64).map(|_| rng.gen()).collect();
            let bv = BitVector::from_words(words, 1 << exp);
            let space = bv.space();
            assert_eq!(space.payload_bits, 1 << exp);
            ratios.push(space.index_bits as f64 / space.payload_bits as f64);
        }
        assert!(ratios[2] < 0.5, "ratio at 2^20 = {}", ratios[2]);
        for pair in ratios.windows(2) {
            assert!(pair[1] <= pair[0], "{ratios:?}");
        }
    }

    #[test]
    fn serialization_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for len in [0usize, 1, 63, 64, 65, 1000] {
            let bv: BitVector = (0..len).map(|_| rng.gen_bool(0.4)).collect();
            let mut buf = Vec::new();
            bv.write_to(&mut buf).unwrap();
            assert_eq!(&buf[..4], b"WBV1");
            assert_eq!(buf.len(), 12 + 8 * len.div_ceil(64));
            let back = BitVector::read_from(&mut buf.as_slice()).unwrap();
            assert_eq!(back, bv);
        }
        let mut bad = Vec::new();
        BitVector::default().write_to(&mut bad).unwrap();
        bad[0] = b'X';
        assert!(BitVector::read_from(&mut bad.as_slice()).is_err());
    }

    #[test]
    fn in_word_select() {
        assert_eq!(select_in_word(1, 0), 0);
        assert_eq!(select_in_word(1 << 63, 0), 63);
        assert_eq!(select_in_word(!0, 37), 37);
        assert_eq!(select_in_word(0b1010_0000_0000_0100, 2), 15);
    }
}
