//! Fixed-width packed unsigned integers.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::io;

/// Number of bits needed to write `max` in binary (0 for `max == 0`).
#[inline]
pub fn bits_for(max: u64) -> u32 {
    64 - max.leading_zeros()
}

#[inline]
fn mask(width: u32) -> u64 {
    if width >= 64 {
        !0
    } else {
        (1u64 << width) - 1
    }
}

/// Reads `len <= 64` bits starting at bit `offset`, least significant bit first.
///
/// `words` must hold at least one word past the last one touched.
#[inline]
pub(crate) fn read_bits(words: &[u64], offset: usize, len: u32) -> u64 {
    let wi = offset >> 6;
    let off = (offset & 63) as u32;
    let lo = words[wi] >> off;
    // Two-step shift so that off == 0 contributes nothing instead of overflowing.
    let hi = (words[wi + 1] << 1) << (63 - off);
    (lo | hi) & mask(len)
}

#[inline]
pub(crate) fn write_bits(words: &mut Vec<u64>, offset: usize, len: u32, value: u64) {
    if len == 0 {
        return;
    }
    let value = value & mask(len);
    let end_word = (offset + len as usize).div_ceil(64) + 1;
    if words.len() < end_word {
        words.resize(end_word, 0);
    }
    let wi = offset >> 6;
    let off = (offset & 63) as u32;
    words[wi] |= value << off;
    if off + len > 64 {
        words[wi + 1] |= value >> (64 - off);
    }
}

/// A vector of unsigned integers, each stored in exactly `width` bits.
#[derive(Clone, Debug)]
pub struct IntVector {
    words: Vec<u64>,
    width: u32,
    len: usize,
}

/// Equality of contents; allocation slack is ignored.
impl PartialEq for IntVector {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.len == other.len && self.iter().eq(other.iter())
    }
}

impl Eq for IntVector {}

impl IntVector {
    pub fn new(width: u32) -> Self {
        assert!(width <= 64, "width {width} exceeds 64 bits");
        IntVector {
            words: vec![0; 2],
            width,
            len: 0,
        }
    }

    /// Packs `values` using the smallest width that fits the largest of them.
    pub fn from_values(values: &[u64]) -> Self {
        let width = bits_for(values.iter().copied().max().unwrap_or(0));
        Self::from_values_with_width(values, width)
    }

    pub fn from_values_with_width(values: &[u64], width: u32) -> Self {
        let mut v = IntVector::new(width);
        v.words.reserve(values.len() * width as usize / 64);
        for &x in values {
            v.push(x);
        }
        v
    }

    pub fn push(&mut self, value: u64) {
        debug_assert!(
            self.width == 64 || value >> self.width == 0,
            "value {value} does not fit in {} bits",
            self.width
        );
        write_bits(&mut self.words, self.len * self.width as usize, self.width, value);
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        read_bits(&self.words, i * self.width as usize, self.width)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    /// Bits occupied by the packed values (excluding allocation slack).
    pub fn size_in_bits(&self) -> u64 {
        self.len as u64 * self.width as u64
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub(crate) fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        io::write_u64(w, self.width as u64)?;
        io::write_u64(w, self.len as u64)?;
        let used = (self.len * self.width as usize).div_ceil(64);
        io::write_words(w, &self.words[..used])
    }

    pub(crate) fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let width = io::read_u64(r)?;
        if width > 64 {
            return Err(Error::format(format!("packed width {width} exceeds 64")));
        }
        let width = width as u32;
        let len = io::read_usize(r)?;
        let used = len
            .checked_mul(width as usize)
            .ok_or_else(|| Error::format("packed vector too long"))?
            .div_ceil(64);
        let mut words = io::read_words(r, used)?;
        words.resize(used + 2, 0);
        Ok(IntVector { words, width, len })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths() {
        assert_eq!(bits_for(0), 0);
        assert_eq!(bits_for(1), 1);
        assert_eq!(bits_for(255), 8);
        assert_eq!(bits_for(256), 9);
        assert_eq!(bits_for(u64::MAX), 64);
    }

    #[test]
    fn values_survive_packing_at_every_width() {
        for width in 0..=64u32 {
            let values: Vec<u64> = (0..200u64)
                .map(|i| i.wrapping_mul(0x9E37_79B9_7F4A_7C15) & mask(width))
                .collect();
            let v = IntVector::from_values_with_width(&values, width);
            assert_eq!(v.iter().collect::<Vec<_>>(), values, "width {width}");
            assert_eq!(v.size_in_bits(), 200 * width as u64);
        }
    }

    #[test]
    fn zero_width_reads_zero() {
        let v = IntVector::from_values(&[0, 0, 0]);
        assert_eq!(v.width(), 0);
        assert_eq!(v.get(2), 0);
    }

    #[test]
    fn bit_window_reads() {
        let mut words = vec![0u64; 1];
        write_bits(&mut words, 60, 10, 0b11_0110_1011);
        assert_eq!(read_bits(&words, 60, 10), 0b11_0110_1011);
        assert_eq!(read_bits(&words, 64, 6), 0b11_0110);
        assert_eq!(read_bits(&words, 0, 0), 0);
    }
}
