//! Block-compressed sequence storage with constant-time short extractions.
//!
//! The sequence is cut into blocks of `block_len` symbols, each packed into a
//! `key_bits`-bit key. Distinct keys are ranked by decreasing frequency (ties
//! by first occurrence) and block `b` is stored as the codeword of its rank,
//! where rank `r` gets the `(r + 1)`-st string of the enumeration
//! `ε, 0, 1, 00, 01, 10, 11, 000, ...`, i.e. `floor(lg(r + 1))` bits. Codewords
//! are not self-delimiting, so block boundaries come from a two-level offset
//! directory: an absolute 64-bit offset every `superblock_blocks` blocks and a
//! narrow relative offset for every block.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::bitvector::{bits_for, read_bits, write_bits, IntVector};
use crate::error::{check_range, Error, Result};
use crate::io;

pub const DEFAULT_TABLE_CAP: u32 = 24;
pub const TABLE_CAP_ENV: &str = "WHEELER_SUMS_TABLE_CAP";

const MAGIC: &[u8; 4] = b"WFV1";

/// The key-width cap, read from `WHEELER_SUMS_TABLE_CAP` when set and valid.
pub fn table_cap_from_env() -> u32 {
    std::env::var(TABLE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|&cap| (1..=32).contains(&cap))
        .unwrap_or(DEFAULT_TABLE_CAP)
}

/// Block geometry derived from `n` and `sigma`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FvParams {
    pub block_len: usize,
    pub sym_bits: u32,
    pub key_bits: u32,
    pub superblock_blocks: usize,
}

impl FvParams {
    /// `block_len = max(1, floor(lg n / (2 * sym_bits)))`, shrunk until
    /// `key_bits <= table_cap`.
    pub fn new(n: usize, sigma: u32, table_cap: u32) -> Result<Self> {
        if sigma < 1 {
            return Err(Error::invalid("alphabet size must be at least 1"));
        }
        let sym_bits = bits_for(sigma as u64 - 1).max(1);
        let lg_n = if n == 0 { 0 } else { n.ilog2() };
        let mut block_len = ((lg_n / (2 * sym_bits)) as usize).max(1);
        while block_len > 1 && block_len as u32 * sym_bits > table_cap {
            block_len -= 1;
        }
        Self::with_block_len(n, sym_bits, block_len)
    }

    fn with_block_len(n: usize, sym_bits: u32, block_len: usize) -> Result<Self> {
        let key_bits = block_len as u32 * sym_bits;
        if key_bits > 32 {
            return Err(Error::invalid(format!(
                "block key of {key_bits} bits exceeds the 32-bit limit"
            )));
        }
        Ok(FvParams {
            block_len,
            sym_bits,
            key_bits,
            superblock_blocks: ceil_lg(n).max(1) as usize,
        })
    }

    #[inline]
    pub fn sym_mask(&self) -> u64 {
        (1u64 << self.sym_bits) - 1
    }

    #[inline]
    pub fn key_mask(&self) -> u64 {
        (1u64 << self.key_bits) - 1
    }

    /// Symbol `t` (0-based) of a packed key.
    #[inline]
    pub fn symbol(&self, key: u64, t: usize) -> u32 {
        ((key >> (t as u32 * self.sym_bits)) & self.sym_mask()) as u32
    }
}

/// `ceil(lg n)`, with `ceil_lg(0) == ceil_lg(1) == 0`.
pub(crate) fn ceil_lg(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        bits_for(n as u64 - 1)
    }
}

/// Codeword length for frequency rank `r`.
#[inline]
pub fn codeword_len(rank: u64) -> u32 {
    bits_for(rank + 1) - 1
}

/// Bits used by a store, by role.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FvSpace {
    pub payload_bits: u64,
    pub pointer_bits: u64,
    pub codebook_bits: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FvStore {
    params: FvParams,
    n: usize,
    sigma: u32,
    /// Rank -> packed block key.
    codebook: IntVector,
    stream: Vec<u64>,
    payload_bits: u64,
    superblock_offsets: Vec<u64>,
    block_offsets: IntVector,
}

impl FvStore {
    pub fn build(seq: &[u32], sigma: u32) -> Result<Self> {
        Self::build_with_cap(seq, sigma, table_cap_from_env())
    }

    pub fn build_with_cap(seq: &[u32], sigma: u32, table_cap: u32) -> Result<Self> {
        let params = FvParams::new(seq.len(), sigma, table_cap)?;
        if let Some(bad) = seq.iter().find(|&&x| x >= sigma) {
            return Err(Error::invalid(format!(
                "symbol {bad} outside alphabet [0, {sigma})"
            )));
        }
        Ok(Self::encode(seq, sigma, params))
    }

    fn encode(seq: &[u32], sigma: u32, params: FvParams) -> Self {
        let keys: Vec<u64> = seq
            .chunks(params.block_len)
            .map(|chunk| pack(chunk, params.sym_bits))
            .collect();

        // (count, first occurrence) per distinct key.
        let mut freq: HashMap<u64, (u64, usize)> = HashMap::new();
        for (b, &key) in keys.iter().enumerate() {
            freq.entry(key).or_insert((0, b)).0 += 1;
        }
        let mut ranked: Vec<(u64, (u64, usize))> = freq.into_iter().collect();
        ranked.sort_unstable_by_key(|&(_, (count, first))| (std::cmp::Reverse(count), first));
        let rank_of: HashMap<u64, u64> = ranked
            .iter()
            .enumerate()
            .map(|(r, &(key, _))| (key, r as u64))
            .collect();
        let codebook = IntVector::from_values_with_width(
            &ranked.iter().map(|&(key, _)| key).collect::<Vec<_>>(),
            params.key_bits,
        );

        let max_len = codeword_len(ranked.len().saturating_sub(1) as u64);
        let sbb = params.superblock_blocks;
        let rel_width = bits_for(((sbb - 1) as u32 * max_len) as u64);

        let mut stream = vec![0u64; 2];
        let mut superblock_offsets = Vec::with_capacity(keys.len() / sbb + 1);
        let mut block_offsets = IntVector::new(rel_width);
        let mut pos = 0usize;
        for b in 0..=keys.len() {
            if b % sbb == 0 {
                superblock_offsets.push(pos as u64);
            }
            block_offsets.push(pos as u64 - superblock_offsets[b / sbb]);
            if b == keys.len() {
                break;
            }
            let rank = rank_of[&keys[b]];
            let len = codeword_len(rank);
            write_bits(&mut stream, pos, len, rank + 1 - (1u64 << len));
            pos += len as usize;
        }
        stream.resize(pos.div_ceil(64) + 2, 0);

        FvStore {
            params,
            n: seq.len(),
            sigma,
            codebook,
            stream,
            payload_bits: pos as u64,
            superblock_offsets,
            block_offsets,
        }
    }

    pub fn params(&self) -> &FvParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn num_blocks(&self) -> usize {
        self.block_offsets.len() - 1
    }

    /// Distinct block contents in the codebook.
    pub fn distinct_blocks(&self) -> usize {
        self.codebook.len()
    }

    #[inline]
    fn offset(&self, b: usize) -> usize {
        (self.superblock_offsets[b / self.params.superblock_blocks] + self.block_offsets.get(b))
            as usize
    }

    /// Frequency rank of block `b` (0-based).
    #[inline]
    pub fn block_rank(&self, b: usize) -> u64 {
        let start = self.offset(b);
        let len = (self.offset(b + 1) - start) as u32;
        (1u64 << len) - 1 + read_bits(&self.stream, start, len)
    }

    /// Packed key of block `b` (0-based); the final block is zero-padded.
    #[inline]
    pub fn block_key(&self, b: usize) -> u64 {
        self.codebook.get(self.block_rank(b) as usize)
    }

    /// Packs the `block_len` symbols starting at 0-based position `pos`.
    /// Positions at or past the end read as 0.
    #[inline]
    pub fn key_at(&self, pos: usize) -> u64 {
        let p = &self.params;
        let b = pos / p.block_len;
        let off = pos % p.block_len;
        let nblocks = self.num_blocks();
        if b >= nblocks {
            return 0;
        }
        let mut key = self.block_key(b) >> (off as u32 * p.sym_bits);
        if off != 0 && b + 1 < nblocks {
            key |= self.block_key(b + 1) << ((p.block_len - off) as u32 * p.sym_bits);
        }
        key & p.key_mask()
    }

    /// Contents of block `b`, 1-based, truncated at the end of the sequence.
    pub fn decode_block(&self, b: usize) -> Result<Vec<u32>> {
        check_range("block index", b as u64, 1, self.num_blocks() as u64)?;
        let start = (b - 1) * self.params.block_len;
        let len = self.params.block_len.min(self.n - start);
        let key = self.block_key(b - 1);
        Ok((0..len).map(|t| self.params.symbol(key, t)).collect())
    }

    /// `S[i..i+len-1]` with 1-based `i`.
    pub fn extract(&self, i: usize, len: usize) -> Result<Vec<u32>> {
        check_range("extract start", i as u64, 1, self.n as u64 + 1)?;
        check_range("extract end", (i + len) as u64 - 1, 0, self.n as u64)?;
        let mut out = Vec::with_capacity(len);
        let bl = self.params.block_len;
        let mut pos = i - 1;
        let end = pos + len;
        while pos < end {
            let key = self.block_key(pos / bl);
            let stop = end.min((pos / bl + 1) * bl);
            out.extend((pos % bl..pos % bl + (stop - pos)).map(|t| self.params.symbol(key, t)));
            pos = stop;
        }
        Ok(out)
    }

    /// The whole sequence.
    pub fn decode(&self) -> Vec<u32> {
        self.extract(1, self.n).expect("full range is always valid")
    }

    pub fn space(&self) -> FvSpace {
        FvSpace {
            payload_bits: self.payload_bits,
            pointer_bits: self.superblock_offsets.len() as u64 * 64
                + self.block_offsets.size_in_bits(),
            codebook_bits: self.codebook.size_in_bits(),
        }
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        io::write_magic(w, MAGIC)?;
        io::write_u64(w, self.n as u64)?;
        io::write_u64(w, self.sigma as u64)?;
        io::write_u64(w, self.params.block_len as u64)?;
        self.codebook.write_to(w)?;
        io::write_u64(w, self.payload_bits)?;
        io::write_words(w, &self.stream[..(self.payload_bits as usize).div_ceil(64)])?;
        io::write_u64(w, self.superblock_offsets.len() as u64)?;
        io::write_words(w, &self.superblock_offsets)?;
        self.block_offsets.write_to(w)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        io::read_magic(r, MAGIC)?;
        let n = io::read_usize(r)?;
        let sigma = u32::try_from(io::read_u64(r)?)
            .map_err(|_| Error::format("alphabet size exceeds 32 bits"))?;
        let block_len = io::read_usize(r)?;
        if sigma < 1 || block_len < 1 {
            return Err(Error::format("invalid store header"));
        }
        let sym_bits = bits_for(sigma as u64 - 1).max(1);
        let params = FvParams::with_block_len(n, sym_bits, block_len)?;
        let codebook = IntVector::read_from(r)?;
        let payload_bits = io::read_u64(r)?;
        let mut stream = io::read_words(r, (payload_bits as usize).div_ceil(64))?;
        stream.resize((payload_bits as usize).div_ceil(64) + 2, 0);
        let sb_count = io::read_usize(r)?;
        let superblock_offsets = io::read_words(r, sb_count)?;
        let block_offsets = IntVector::read_from(r)?;

        let nblocks = n.div_ceil(block_len);
        if codebook.width() != params.key_bits
            || block_offsets.len() != nblocks + 1
            || sb_count != nblocks / params.superblock_blocks + 1
        {
            return Err(Error::format("store directory does not match its header"));
        }
        let store = FvStore {
            params,
            n,
            sigma,
            codebook,
            stream,
            payload_bits,
            superblock_offsets,
            block_offsets,
        };
        for b in 0..nblocks {
            let (start, end) = (store.offset(b), store.offset(b + 1));
            if end < start
                || end > payload_bits as usize
                || end - start > 32
                || store.block_rank(b) >= store.codebook.len() as u64
            {
                return Err(Error::format(format!("corrupt offset for block {b}")));
            }
        }
        Ok(store)
    }
}

fn pack(symbols: &[u32], sym_bits: u32) -> u64 {
    symbols
        .iter()
        .enumerate()
        .fold(0u64, |key, (t, &s)| key | (s as u64) << (t as u32 * sym_bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::hk;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_seq(rng: &mut ChaCha8Rng, n: usize, sigma: u32) -> Vec<u32> {
        (0..n).map(|_| rng.gen_range(0..sigma)).collect()
    }

    fn skewed_seq(rng: &mut ChaCha8Rng, n: usize) -> Vec<u32> {
        (0..n)
            .map(|_| if rng.gen_bool(0.9) { 1 } else { rng.gen_range(2..4) })
            .collect()
    }

    #[test]
    fn params_follow_block_rule() {
        let p = FvParams::new(1 << 20, 4, 24).unwrap();
        assert_eq!((p.block_len, p.sym_bits, p.key_bits), (5, 2, 10));
        assert_eq!(p.superblock_blocks, 20);
        let p = FvParams::new(3, 2, 24).unwrap();
        assert_eq!((p.block_len, p.key_bits), (1, 1));
        let p = FvParams::new(1 << 20, 16, 6).unwrap();
        assert_eq!((p.block_len, p.key_bits), (1, 4));
        assert!(FvParams::new(10, 0, 24).is_err());
        assert!(FvStore::build(&[1, 5], 4).is_err());
    }

    #[test]
    fn codeword_lengths_follow_enumeration() {
        // ε, 0, 1, 00, 01, 10, 11, 000
        let lens: Vec<u32> = (0..8).map(codeword_len).collect();
        assert_eq!(lens, [0, 1, 1, 2, 2, 2, 2, 3]);
        for r in 0..10_000u64 {
            assert_eq!(codeword_len(r), ((r + 1) as f64).log2().floor() as u32);
        }
    }

    #[test]
    fn single_distinct_block_costs_nothing() {
        // n = 4098 gives block_len 6 and no partial block, so every block of
        // the alternation is 010101.
        let seq: Vec<u32> = [0, 1].repeat(2049);
        let store = FvStore::build_with_cap(&seq, 2, 24).unwrap();
        assert_eq!(store.params().block_len, 6);
        assert_eq!(store.distinct_blocks(), 1);
        assert_eq!(store.space().payload_bits, 0);
        assert_eq!(store.decode(), seq);

        let constant = vec![3u32; 1000];
        let store = FvStore::build_with_cap(&constant, 4, 24).unwrap();
        assert_eq!(store.space().payload_bits, 0);
        assert_eq!(store.decode(), constant);
    }

    #[test]
    fn alternation_with_odd_block_length() {
        // n = 1024 gives block_len 5: blocks alternate between 01010 (103 times,
        // the padded tail included) and 10101 (102 times, one-bit codeword).
        let seq: Vec<u32> = [0, 1].repeat(512);
        let store = FvStore::build_with_cap(&seq, 2, 24).unwrap();
        assert_eq!(store.params().block_len, 5);
        assert_eq!(store.num_blocks(), 205);
        assert_eq!(store.distinct_blocks(), 2);
        assert_eq!(store.space().payload_bits, 102);
        assert_eq!(store.decode_block(1).unwrap(), [0, 1, 0, 1, 0]);
        assert_eq!(store.decode_block(2).unwrap(), [1, 0, 1, 0, 1]);
        assert_eq!(store.decode_block(205).unwrap(), [0, 1, 0, 1]);
        assert!(store.decode_block(0).is_err());
        assert!(store.decode_block(206).is_err());
    }

    #[test]
    fn extract_matches_plain_array() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let seq = random_seq(&mut rng, 10_000, 4);
        let store = FvStore::build_with_cap(&seq, 4, 24).unwrap();
        let sb_symbols = store.params().block_len * store.params().superblock_blocks;
        for _ in 0..1000 {
            let i = rng.gen_range(1..=seq.len());
            let len = rng.gen_range(0..=(seq.len() + 1 - i).min(64));
            assert_eq!(store.extract(i, len).unwrap(), &seq[i - 1..i - 1 + len]);
        }
        // Across a superblock boundary.
        let i = sb_symbols - 3;
        assert_eq!(store.extract(i, 10).unwrap(), &seq[i - 1..i + 9]);
        assert_eq!(store.extract(1, seq.len()).unwrap(), seq);
        assert!(store.extract(seq.len() + 1, 0).unwrap().is_empty());
        assert!(store.extract(0, 1).is_err());
        assert!(store.extract(seq.len(), 2).is_err());
    }

    #[test]
    fn blocks_concatenate_to_sequence() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &(n, sigma) in &[(1usize, 2u32), (7, 3), (513, 16), (5000, 5)] {
            let seq = random_seq(&mut rng, n, sigma);
            let store = FvStore::build_with_cap(&seq, sigma, 24).unwrap();
            let joined: Vec<u32> = (1..=store.num_blocks())
                .flat_map(|b| store.decode_block(b).unwrap())
                .collect();
            assert_eq!(joined, seq);
            for pos in 0..n {
                let key = store.key_at(pos);
                for t in 0..store.params().block_len {
                    let want = seq.get(pos + t).copied().unwrap_or(0);
                    assert_eq!(store.params().symbol(key, t), want);
                }
            }
        }
    }

    #[test]
    fn empty_sequence() {
        let store = FvStore::build(&[], 4).unwrap();
        assert_eq!(store.num_blocks(), 0);
        assert!(store.decode().is_empty());
        assert_eq!(store.key_at(0), 0);
    }

    #[test]
    fn payload_tracks_entropy_on_skewed_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for exp in [14u32, 16, 18] {
            let n = 1usize << exp;
            let seq = skewed_seq(&mut rng, n);
            let store = FvStore::build_with_cap(&seq, 4, 24).unwrap();
            let payload = store.space().payload_bits as f64;
            let sym_bits = store.params().sym_bits as f64;
            assert!(payload < n as f64 * sym_bits);
            for k in 0..=2 {
                let bound = n as f64 * (hk(&seq, k) + 0.25);
                assert!(payload <= bound, "n=2^{exp} k={k}: {payload} > {bound}");
            }
        }
    }

    #[test]
    fn serialization_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [0usize, 1, 100, 4097] {
            let seq = random_seq(&mut rng, n, 6);
            let store = FvStore::build_with_cap(&seq, 6, 24).unwrap();
            let mut buf = Vec::new();
            store.write_to(&mut buf).unwrap();
            assert_eq!(&buf[..4], b"WFV1");
            let back = FvStore::read_from(&mut buf.as_slice()).unwrap();
            assert_eq!(back, store);
            assert_eq!(back.decode(), seq);
        }
    }
}
