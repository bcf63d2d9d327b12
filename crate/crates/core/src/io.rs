//! Little-endian binary helpers shared by the on-disk formats.

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub(crate) fn write_magic<W: Write>(w: &mut W, magic: &[u8; 4]) -> Result<()> {
    w.write_all(magic)?;
    Ok(())
}

pub(crate) fn read_magic<R: Read>(r: &mut R, magic: &[u8; 4]) -> Result<()> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    if &buf != magic {
        return Err(Error::format(format!(
            "expected magic {:?}, found {:?}",
            String::from_utf8_lossy(magic),
            String::from_utf8_lossy(&buf)
        )));
    }
    Ok(())
}

pub(crate) fn write_u64<W: Write>(w: &mut W, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

pub(crate) fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

pub(crate) fn read_usize<R: Read>(r: &mut R) -> Result<usize> {
    let v = read_u64(r)?;
    usize::try_from(v).map_err(|_| Error::format(format!("length {v} does not fit in memory")))
}

pub(crate) fn write_words<W: Write>(w: &mut W, words: &[u64]) -> Result<()> {
    for &word in words {
        write_u64(w, word)?;
    }
    Ok(())
}

pub(crate) fn read_words<R: Read>(r: &mut R, count: usize) -> Result<Vec<u64>> {
    // Grow as we go so a corrupt count cannot trigger a huge allocation up front.
    let mut words = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        words.push(read_u64(r)?);
    }
    Ok(words)
}

pub(crate) fn write_bytes<W: Write>(w: &mut W, bytes: &[u8]) -> Result<()> {
    write_u64(w, bytes.len() as u64)?;
    w.write_all(bytes)?;
    Ok(())
}

pub(crate) fn read_bytes<R: Read>(r: &mut R) -> Result<Vec<u8>> {
    let len = read_usize(r)?;
    let mut buf = Vec::new();
    r.take(len as u64).read_to_end(&mut buf)?;
    if buf.len() != len {
        return Err(Error::format("truncated byte string"));
    }
    Ok(buf)
}
