//! Little-endian byte encoding used by the index file format.
//!
//! Every structure that lives inside an index file implements [`Persist`].
//! Readers never panic on malformed input: truncation and inconsistent
//! lengths surface as [`Error::Integrity`].

use crate::error::{Error, Result};

#[derive(Debug, Default)]
pub struct ByteWriter {
    buf: Vec<u8>,
}

impl ByteWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put_u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn put_u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn put_u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn put_u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn put_usize(&mut self, v: usize) {
        self.put_u64(v as u64);
    }

    pub fn put_f64(&mut self, v: f64) {
        self.put_u64(v.to_bits());
    }

    pub fn put_bytes(&mut self, b: &[u8]) {
        self.put_u64(b.len() as u64);
        self.buf.extend_from_slice(b);
    }

    pub fn put_raw(&mut self, b: &[u8]) {
        self.buf.extend_from_slice(b);
    }

    pub fn put_u64s(&mut self, v: &[u64]) {
        self.put_u64(v.len() as u64);
        for &x in v {
            self.put_u64(x);
        }
    }

    pub fn put_u32s(&mut self, v: &[u32]) {
        self.put_u64(v.len() as u64);
        for &x in v {
            self.put_u32(x);
        }
    }

    pub fn put_u16s(&mut self, v: &[u16]) {
        self.put_u64(v.len() as u64);
        for &x in v {
            self.put_u16(x);
        }
    }

    pub fn put_usizes(&mut self, v: &[usize]) {
        self.put_u64(v.len() as u64);
        for &x in v {
            self.put_u64(x as u64);
        }
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.buf
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.buf
    }
}

#[derive(Debug)]
pub struct ByteReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(k)
            .filter(|&e| e <= self.data.len())
            .ok_or_else(|| {
                Error::Integrity(format!(
                    "truncated input: need {k} bytes at offset {}, have {}",
                    self.pos,
                    self.data.len() - self.pos
                ))
            })?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Integrity("length overflows usize".into()))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    /// Reads a length prefix and checks that `elem_size * len` bytes remain.
    fn len_prefix(&mut self, elem_size: usize) -> Result<usize> {
        let len = self.usize()?;
        match len.checked_mul(elem_size) {
            Some(b) if b <= self.remaining() => Ok(len),
            _ => Err(Error::Integrity(format!(
                "length prefix {len} exceeds remaining {} bytes",
                self.remaining()
            ))),
        }
    }

    pub fn bytes(&mut self) -> Result<&'a [u8]> {
        let len = self.len_prefix(1)?;
        self.take(len)
    }

    pub fn raw(&mut self, k: usize) -> Result<&'a [u8]> {
        self.take(k)
    }

    pub fn u64s(&mut self) -> Result<Vec<u64>> {
        let len = self.len_prefix(8)?;
        (0..len).map(|_| self.u64()).collect()
    }

    pub fn u32s(&mut self) -> Result<Vec<u32>> {
        let len = self.len_prefix(4)?;
        (0..len).map(|_| self.u32()).collect()
    }

    pub fn u16s(&mut self) -> Result<Vec<u16>> {
        let len = self.len_prefix(2)?;
        (0..len).map(|_| self.u16()).collect()
    }

    pub fn usizes(&mut self) -> Result<Vec<usize>> {
        let len = self.len_prefix(8)?;
        (0..len).map(|_| self.usize()).collect()
    }

    pub fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn expect_end(&self) -> Result<()> {
        if self.remaining() == 0 {
            Ok(())
        } else {
            Err(Error::Integrity(format!("{} trailing bytes", self.remaining())))
        }
    }
}

/// Binary (de)serialization into the index file payload.
pub trait Persist: Sized {
    fn write_to(&self, w: &mut ByteWriter);
    fn read_from(r: &mut ByteReader<'_>) -> Result<Self>;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_read_is_integrity_error() {
        let mut w = ByteWriter::new();
        w.put_u64s(&[1, 2, 3]);
        let bytes = w.into_inner();
        let mut r = ByteReader::new(&bytes[..bytes.len() - 1]);
        assert!(matches!(r.u64s(), Err(Error::Integrity(_))));
    }

    #[test]
    fn absurd_length_prefix_rejected_without_allocating() {
        let mut w = ByteWriter::new();
        w.put_u64(u64::MAX / 2);
        let bytes = w.into_inner();
        let mut r = ByteReader::new(&bytes);
        assert!(r.u64s().is_err());
    }
}
