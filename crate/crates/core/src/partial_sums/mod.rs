//! Searchable partial sums over static integer sequences.
//!
//! For `S[1..n]`, `sum(i)` is `S[1] + ... + S[i]` (with `sum(0) = 0`) and
//! `search(j)` is the smallest `i` with `sum(i) >= j`, i.e. the element that
//! contains the `j`-th unit. Three backends are provided:
//!
//! * [`MnSums`]: one bit per unit, `sum` by select and `search` by rank.
//! * [`EntropySums`]: block-compressed storage plus sampled sums, sampled
//!   searches and two universal lookup tables; both queries take a constant
//!   number of word operations and the payload is bounded by the empirical
//!   entropy of `S`.
//! * [`ChainSums`]: a degenerate wavelet tree with one bitvector per value;
//!   `sum` costs one rank per level, `search` is a binary search over `sum`.
//!
//! [`OutDegreeSums`] and [`InDegreeSums`] adapt the positive-only backends to
//! degree sequences, which may contain zeros.

mod chain;
mod entropy;
mod mn;
mod transform;

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

pub use chain::{ChainSums, LevelStep};
pub use entropy::{EntropySums, SearchIndex, SumIndex, UniversalSearchTable, UniversalSumTable};
pub use mn::MnSums;
pub use transform::{InDegreeSums, OutDegreeSums};

use crate::error::{Error, Result};
use crate::io;

const MAGIC: &[u8; 4] = b"WPS1";

/// Common query surface of every backend.
pub trait PartialSums {
    /// Number of elements `n`.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `u = sum(n)`.
    fn total(&self) -> u64;

    /// Sum of the first `i` elements, `0 <= i <= n`.
    fn sum(&self, i: usize) -> Result<u64>;

    /// Smallest `i` with `sum(i) >= j`, for `1 <= j <= u`.
    fn search(&self, j: u64) -> Result<usize>;

    fn space_breakdown(&self) -> SpaceBreakdown;

    fn backend(&self) -> Backend;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Backend {
    Mn,
    Entropy,
    Chain,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Mn, Backend::Entropy, Backend::Chain];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Mn => "mn",
            Backend::Entropy => "entropy",
            Backend::Chain => "chain",
        }
    }

    fn tag(self) -> u64 {
        match self {
            Backend::Mn => 0,
            Backend::Entropy => 1,
            Backend::Chain => 2,
        }
    }

    fn from_tag(tag: u64) -> Result<Self> {
        match tag {
            0 => Ok(Backend::Mn),
            1 => Ok(Backend::Entropy),
            2 => Ok(Backend::Chain),
            other => Err(Error::format(format!("unknown backend tag {other}"))),
        }
    }

    /// Whether the backend needs every element to be at least 1.
    pub fn requires_positive(self) -> bool {
        !matches!(self, Backend::Chain)
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mn" => Ok(Backend::Mn),
            "entropy" => Ok(Backend::Entropy),
            "chain" => Ok(Backend::Chain),
            other => Err(Error::invalid(format!(
                "unknown backend {other:?} (expected mn, entropy or chain)"
            ))),
        }
    }
}

/// Bit counts per component. `payload_bits` is the encoded sequence itself;
/// everything else is auxiliary.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpaceBreakdown {
    pub payload_bits: u64,
    /// Block pointers and codebook of the compressed store.
    pub pointer_bits: u64,
    pub sum_index_bits: u64,
    pub search_index_bits: u64,
    pub table_bits: u64,
}

impl SpaceBreakdown {
    pub fn auxiliary_bits(&self) -> u64 {
        self.pointer_bits + self.sum_index_bits + self.search_index_bits + self.table_bits
    }

    pub fn total_bits(&self) -> u64 {
        self.payload_bits + self.auxiliary_bits()
    }

    /// `(label, bits)` pairs in a fixed order, for reports.
    pub fn components(&self) -> [(&'static str, u64); 5] {
        [
            ("payload", self.payload_bits),
            ("pointers", self.pointer_bits),
            ("sum_index", self.sum_index_bits),
            ("search_index", self.search_index_bits),
            ("tables", self.table_bits),
        ]
    }
}

impl std::ops::Add for SpaceBreakdown {
    type Output = SpaceBreakdown;

    fn add(self, o: SpaceBreakdown) -> SpaceBreakdown {
        SpaceBreakdown {
            payload_bits: self.payload_bits + o.payload_bits,
            pointer_bits: self.pointer_bits + o.pointer_bits,
            sum_index_bits: self.sum_index_bits + o.sum_index_bits,
            search_index_bits: self.search_index_bits + o.search_index_bits,
            table_bits: self.table_bits + o.table_bits,
        }
    }
}

/// Any of the three backends, chosen at run time.
#[allow(clippy::large_enum_variant)] // few instances, hot dispatch
#[derive(Clone, Debug)]
pub enum AnyPartialSums {
    Mn(MnSums),
    Entropy(EntropySums),
    Chain(ChainSums),
}

impl AnyPartialSums {
    /// Builds `backend` over `seq`; `sigma` defaults to `max(seq) + 1`.
    pub fn build(backend: Backend, seq: &[u32], sigma: Option<u32>) -> Result<Self> {
        let sigma = resolve_sigma(seq, sigma)?;
        Ok(match backend {
            Backend::Mn => AnyPartialSums::Mn(MnSums::build(seq)?),
            Backend::Entropy => AnyPartialSums::Entropy(EntropySums::build(seq, sigma)?),
            Backend::Chain => AnyPartialSums::Chain(ChainSums::build(seq, sigma)?),
        })
    }

    fn as_dyn(&self) -> &dyn PartialSums {
        match self {
            AnyPartialSums::Mn(s) => s,
            AnyPartialSums::Entropy(s) => s,
            AnyPartialSums::Chain(s) => s,
        }
    }

    pub fn sigma(&self) -> u32 {
        match self {
            AnyPartialSums::Mn(s) => s.sigma(),
            AnyPartialSums::Entropy(s) => s.sigma(),
            AnyPartialSums::Chain(s) => s.sigma(),
        }
    }

    /// Reconstructs the indexed sequence.
    pub fn to_vec(&self) -> Vec<u32> {
        match self {
            AnyPartialSums::Mn(s) => s.to_vec(),
            AnyPartialSums::Entropy(s) => s.to_vec(),
            AnyPartialSums::Chain(s) => s.to_vec(),
        }
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        io::write_magic(w, MAGIC)?;
        io::write_u64(w, self.backend().tag())?;
        io::write_u64(w, self.len() as u64)?;
        io::write_u64(w, self.sigma() as u64)?;
        io::write_u64(w, self.total())?;
        match self {
            AnyPartialSums::Mn(s) => s.bits().write_to(w),
            AnyPartialSums::Entropy(s) => s.store().write_to(w),
            AnyPartialSums::Chain(s) => {
                io::write_u64(w, s.levels().len() as u64)?;
                s.levels().iter().try_for_each(|level| level.write_to(w))
            }
        }
    }

    /// Reads the stored sequence representation and rebuilds derived indexes.
    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        io::read_magic(r, MAGIC)?;
        let backend = Backend::from_tag(io::read_u64(r)?)?;
        let n = io::read_usize(r)?;
        let sigma = u32::try_from(io::read_u64(r)?)
            .map_err(|_| Error::format("alphabet size exceeds 32 bits"))?;
        let total = io::read_u64(r)?;
        let sums = match backend {
            Backend::Mn => AnyPartialSums::Mn(MnSums::from_bits(
                crate::bitvector::BitVector::read_from(r)?,
                sigma,
            )?),
            Backend::Entropy => AnyPartialSums::Entropy(EntropySums::from_store(
                crate::fv::FvStore::read_from(r)?,
            )?),
            Backend::Chain => {
                let count = io::read_usize(r)?;
                let levels = (0..count)
                    .map(|_| crate::bitvector::BitVector::read_from(r))
                    .collect::<Result<Vec<_>>>()?;
                AnyPartialSums::Chain(ChainSums::from_levels(levels, n)?)
            }
        };
        if sums.len() != n || sums.total() != total || sums.sigma() != sigma {
            return Err(Error::format("partial-sums header does not match its payload"));
        }
        Ok(sums)
    }
}

impl PartialSums for AnyPartialSums {
    fn len(&self) -> usize {
        self.as_dyn().len()
    }

    fn total(&self) -> u64 {
        self.as_dyn().total()
    }

    #[inline]
    fn sum(&self, i: usize) -> Result<u64> {
        match self {
            AnyPartialSums::Mn(s) => s.sum(i),
            AnyPartialSums::Entropy(s) => s.sum(i),
            AnyPartialSums::Chain(s) => s.sum(i),
        }
    }

    #[inline]
    fn search(&self, j: u64) -> Result<usize> {
        match self {
            AnyPartialSums::Mn(s) => s.search(j),
            AnyPartialSums::Entropy(s) => s.search(j),
            AnyPartialSums::Chain(s) => s.search(j),
        }
    }

    fn space_breakdown(&self) -> SpaceBreakdown {
        self.as_dyn().space_breakdown()
    }

    fn backend(&self) -> Backend {
        self.as_dyn().backend()
    }
}

pub(crate) fn resolve_sigma(seq: &[u32], sigma: Option<u32>) -> Result<u32> {
    let needed = seq.iter().copied().max().map_or(1, |m| m as u64 + 1);
    if needed > u32::MAX as u64 {
        return Err(Error::invalid("symbol values must be below 2^32 - 1"));
    }
    match sigma {
        None => Ok(needed as u32),
        Some(s) if (s as u64) < needed => Err(Error::invalid(format!(
            "alphabet size {s} does not cover maximum value {}",
            needed - 1
        ))),
        Some(s) => Ok(s),
    }
}

pub(crate) fn require_positive(seq: &[u32]) -> Result<()> {
    match seq.iter().position(|&x| x == 0) {
        Some(p) => Err(Error::invalid(format!(
            "element {} is 0; this backend needs positive values (apply a degree transform first)",
            p + 1
        ))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests;
