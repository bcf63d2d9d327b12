//! Degree sequences may contain zeros, which the unary and compressed
//! backends cannot store. Out-degrees are shifted by one and in-degrees lose
//! their leading zeros (the only zeros a Wheeler graph's in-degree sequence
//! can have); both shifts are undone at query time.

use std::io::{Read, Write};

use crate::error::{check_range, Error, Result};
use crate::io;

use super::{AnyPartialSums, Backend, PartialSums, SpaceBreakdown};

/// `sum` over a sequence `D >= 0`, stored as `D' = D + 1`:
/// `sum_D(i) = sum_D'(i) - i`.
#[derive(Clone, Debug)]
pub struct OutDegreeSums {
    inner: AnyPartialSums,
}

impl OutDegreeSums {
    pub fn build(backend: Backend, degrees: &[u32]) -> Result<Self> {
        let shifted = degrees
            .iter()
            .map(|&d| {
                d.checked_add(1)
                    .ok_or_else(|| Error::invalid("degree too large to shift"))
            })
            .collect::<Result<Vec<u32>>>()?;
        Ok(OutDegreeSums {
            inner: AnyPartialSums::build(backend, &shifted, None)?,
        })
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    /// Sum of all degrees.
    pub fn total(&self) -> u64 {
        self.inner.total() - self.inner.len() as u64
    }

    #[inline]
    pub fn sum(&self, i: usize) -> Result<u64> {
        Ok(self.inner.sum(i)? - i as u64)
    }

    /// The shifted sequence's structure.
    pub fn inner(&self) -> &AnyPartialSums {
        &self.inner
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.inner.to_vec().into_iter().map(|d| d - 1).collect()
    }

    pub fn space_breakdown(&self) -> SpaceBreakdown {
        self.inner.space_breakdown()
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        self.inner.write_to(w)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let inner = AnyPartialSums::read_from(r)?;
        if !inner.to_vec().contains(&0) {
            Ok(OutDegreeSums { inner })
        } else {
            Err(Error::format("shifted out-degrees must be positive"))
        }
    }
}

/// `search` over a sequence whose zeros form a prefix of length `z`, stored
/// without them: `search_D(j) = search_D'(j) + z`.
#[derive(Clone, Debug)]
pub struct InDegreeSums {
    leading_zeros: usize,
    inner: AnyPartialSums,
}

impl InDegreeSums {
    pub fn build(backend: Backend, degrees: &[u32]) -> Result<Self> {
        let z = degrees.iter().take_while(|&&d| d == 0).count();
        if let Some(p) = degrees[z..].iter().position(|&d| d == 0) {
            return Err(Error::invalid(format!(
                "zero at position {} follows a nonzero degree",
                z + p + 1
            )));
        }
        Ok(InDegreeSums {
            leading_zeros: z,
            inner: AnyPartialSums::build(backend, &degrees[z..], None)?,
        })
    }

    pub fn leading_zeros(&self) -> usize {
        self.leading_zeros
    }

    pub fn len(&self) -> usize {
        self.leading_zeros + self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total(&self) -> u64 {
        self.inner.total()
    }

    #[inline]
    pub fn search(&self, j: u64) -> Result<usize> {
        Ok(self.inner.search(j)? + self.leading_zeros)
    }

    pub fn sum(&self, i: usize) -> Result<u64> {
        check_range("sum argument", i as u64, 0, self.len() as u64)?;
        if i <= self.leading_zeros {
            Ok(0)
        } else {
            self.inner.sum(i - self.leading_zeros)
        }
    }

    pub fn inner(&self) -> &AnyPartialSums {
        &self.inner
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut out = vec![0; self.leading_zeros];
        out.extend(self.inner.to_vec());
        out
    }

    pub fn space_breakdown(&self) -> SpaceBreakdown {
        let mut space = self.inner.space_breakdown();
        space.pointer_bits += 64; // the zero count
        space
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        io::write_u64(w, self.leading_zeros as u64)?;
        self.inner.write_to(w)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let leading_zeros = io::read_usize(r)?;
        let inner = AnyPartialSums::read_from(r)?;
        if inner.to_vec().contains(&0) {
            return Err(Error::format("stored in-degrees must be positive"));
        }
        Ok(InDegreeSums {
            leading_zeros,
            inner,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG_DOUT: [u32; 11] = [1, 1, 1, 2, 1, 1, 2, 1, 1, 0, 1];
    const FIG_DIN: [u32; 11] = [0, 2, 1, 1, 1, 1, 2, 1, 1, 1, 1];

    fn brute_sum(d: &[u32], i: usize) -> u64 {
        d[..i].iter().map(|&x| x as u64).sum()
    }

    fn brute_search(d: &[u32], j: u64) -> usize {
        (0..=d.len()).find(|&i| brute_sum(d, i) >= j).unwrap()
    }

    #[test]
    fn out_degree_shift() {
        for backend in Backend::ALL {
            let s = OutDegreeSums::build(backend, &FIG_DOUT).unwrap();
            assert_eq!(s.inner().to_vec(), [2, 2, 2, 3, 2, 2, 3, 2, 2, 1, 2]);
            assert_eq!(s.inner().sum(8).unwrap(), 18);
            assert_eq!(s.sum(8).unwrap(), 10);
            assert_eq!(s.sum(3).unwrap(), 3);
            assert_eq!(s.sum(6).unwrap(), 7);
            assert_eq!(s.total(), 12);
            assert_eq!(s.degrees(), FIG_DOUT);
            for i in 0..=11 {
                assert_eq!(s.sum(i).unwrap(), brute_sum(&FIG_DOUT, i));
            }
            let zeros = OutDegreeSums::build(backend, &[0; 7]).unwrap();
            assert!((0..=7).all(|i| zeros.sum(i).unwrap() == 0));
        }
    }

    #[test]
    fn out_degree_on_positive_input_agrees_with_direct_build() {
        let d = [3u32, 1, 4, 1, 5, 2, 6];
        for backend in Backend::ALL {
            let adapted = OutDegreeSums::build(backend, &d).unwrap();
            let direct = AnyPartialSums::build(backend, &d, None).unwrap();
            for i in 0..=d.len() {
                assert_eq!(adapted.sum(i).unwrap(), direct.sum(i).unwrap());
            }
        }
    }

    #[test]
    fn in_degree_shift() {
        for backend in Backend::ALL {
            let s = InDegreeSums::build(backend, &FIG_DIN).unwrap();
            assert_eq!(s.leading_zeros(), 1);
            assert_eq!(s.inner().to_vec(), &FIG_DIN[1..]);
            assert_eq!(s.inner().total(), 12);
            assert_eq!(s.inner().search(7).unwrap(), 6);
            assert_eq!(s.search(7).unwrap(), 7);
            assert_eq!(s.search(9).unwrap(), 8);
            for j in 1..=12 {
                assert_eq!(s.search(j).unwrap(), brute_search(&FIG_DIN, j));
            }
            for i in 0..=11 {
                assert_eq!(s.sum(i).unwrap(), brute_sum(&FIG_DIN, i));
            }

            let s = InDegreeSums::build(backend, &[0, 0, 5]).unwrap();
            assert_eq!(s.search(3).unwrap(), 3);
            let s = InDegreeSums::build(backend, &[2, 1]).unwrap();
            assert_eq!(s.leading_zeros(), 0);
            assert_eq!(s.search(3).unwrap(), 2);
            assert!(InDegreeSums::build(backend, &[0, 1, 0, 2]).is_err());
            assert!(InDegreeSums::build(backend, &[0, 0]).unwrap().search(1).is_err());
        }
    }
}
