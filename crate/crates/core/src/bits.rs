//! Raw bit buffers, variable-length codes, and fixed-width packed integers.
//!
//! Bit `i` of a buffer lives in word `i / 64` at bit `i % 64`.

use crate::error::{Error, Result};
use crate::persist::{ByteReader, ByteWriter, Persist};

/// Number of bits needed to store values in `0..=max` (at least 1).
pub fn bit_width(max: u64) -> u32 {
    (64 - max.leading_zeros()).max(1)
}

/// Append-only bit buffer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitBuf {
    words: Vec<u64>,
    len: usize,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`, least significant first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        if width == 0 {
            return;
        }
        let value = if width == 64 { value } else { value & ((1u64 << width) - 1) };
        let off = (self.len % 64) as u32;
        if off == 0 {
            self.words.push(value);
        } else {
            *self.words.last_mut().unwrap() |= value << off;
            if off + width > 64 {
                self.words.push(value >> (64 - off));
            }
        }
        self.len += width as usize;
    }

    /// Elias-gamma code of `v >= 1`: `⌊log2 v⌋` zeros, then `v` from its top bit down.
    pub fn push_gamma(&mut self, v: u64) {
        debug_assert!(v >= 1);
        let nbits = 64 - v.leading_zeros();
        for _ in 1..nbits {
            self.push(false);
        }
        for k in (0..nbits).rev() {
            self.push((v >> k) & 1 == 1);
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Reads `width` bits starting at bit `i`.
    #[inline]
    pub fn get_bits(&self, i: usize, width: u32) -> u64 {
        if width == 0 {
            return 0;
        }
        let w = i / 64;
        let off = (i % 64) as u32;
        let mut v = self.words[w] >> off;
        if off + width > 64 {
            v |= self.words[w + 1] << (64 - off);
        }
        if width == 64 {
            v
        } else {
            v & ((1u64 << width) - 1)
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn from_words(words: Vec<u64>, len: usize) -> Result<Self> {
        if words.len() != len.div_ceil(64) {
            return Err(Error::Integrity(format!(
                "bit buffer of {len} bits needs {} words, found {}",
                len.div_ceil(64),
                words.len()
            )));
        }
        Ok(Self { words, len })
    }

    pub fn reader(&self, pos: usize) -> BitCursor<'_> {
        BitCursor { buf: self, pos }
    }
}

impl Persist for BitBuf {
    fn write_to(&self, w: &mut ByteWriter) {
        w.put_usize(self.len);
        w.put_u64s(&self.words);
    }

    fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let len = r.usize()?;
        let words = r.u64s()?;
        Self::from_words(words, len)
    }
}

/// Sequential reader over a [`BitBuf`].
#[derive(Debug, Clone)]
pub struct BitCursor<'a> {
    buf: &'a BitBuf,
    pos: usize,
}

impl BitCursor<'_> {
    #[inline]
    pub fn read(&mut self) -> Result<bool> {
        if self.pos >= self.buf.len {
            return Err(Error::Integrity("bit stream exhausted".into()));
        }
        let b = self.buf.get(self.pos);
        self.pos += 1;
        Ok(b)
    }

    pub fn read_bits(&mut self, width: u32) -> Result<u64> {
        if self.pos + width as usize > self.buf.len {
            return Err(Error::Integrity("bit stream exhausted".into()));
        }
        let v = self.buf.get_bits(self.pos, width);
        self.pos += width as usize;
        Ok(v)
    }

    pub fn read_gamma(&mut self) -> Result<u64> {
        let mut zeros = 0u32;
        while !self.read()? {
            zeros += 1;
            if zeros >= 64 {
                return Err(Error::Integrity("malformed gamma code".into()));
            }
        }
        let mut v = 1u64;
        for _ in 0..zeros {
            v = (v << 1) | self.read()? as u64;
        }
        Ok(v)
    }

    pub fn position(&self) -> usize {
        self.pos
    }
}

/// Fixed-width packed unsigned integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntVector {
    bits: BitBuf,
    width: u32,
    len: usize,
}

impl IntVector {
    /// Packs `values` using the narrowest width that fits `max_value`.
    pub fn from_slice(values: &[u64], max_value: u64) -> Self {
        let width = bit_width(max_value);
        let mut bits = BitBuf::with_capacity(values.len() * width as usize);
        for &v in values {
            debug_assert!(v <= max_value);
            bits.push_bits(v, width);
        }
        Self {
            bits,
            width,
            len: values.len(),
        }
    }

    pub fn from_usizes(values: &[usize], max_value: usize) -> Self {
        let v: Vec<u64> = values.iter().map(|&x| x as u64).collect();
        Self::from_slice(&v, max_value as u64)
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        self.bits.get_bits(i * self.width as usize, self.width)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn size_bits(&self) -> usize {
        self.len * self.width as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(|i| self.get(i))
    }
}

impl Persist for IntVector {
    fn write_to(&self, w: &mut ByteWriter) {
        w.put_u32(self.width);
        w.put_usize(self.len);
        self.bits.write_to(w);
    }

    fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let width = r.u32()?;
        let len = r.usize()?;
        let bits = BitBuf::read_from(r)?;
        if width == 0 || width > 64 || Some(bits.len()) != len.checked_mul(width as usize) {
            return Err(Error::Integrity(format!(
                "packed vector: width {width}, len {len}, {} payload bits",
                bits.len()
            )));
        }
        Ok(Self { bits, width, len })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gamma_small_values() {
        let mut b = BitBuf::new();
        for v in 1..=40u64 {
            b.push_gamma(v);
        }
        let mut c = b.reader(0);
        for v in 1..=40u64 {
            assert_eq!(c.read_gamma().unwrap(), v);
        }
        assert!(c.read().is_err());
    }

    #[test]
    fn width_of_small_maxima() {
        assert_eq!(bit_width(0), 1);
        assert_eq!(bit_width(1), 1);
        assert_eq!(bit_width(2), 2);
        assert_eq!(bit_width(12), 4);
        assert_eq!(bit_width(u64::MAX), 64);
    }

    proptest! {
        #[test]
        fn packed_values_read_back(values in proptest::collection::vec(any::<u64>(), 0..200), shift in 0u32..64) {
            let vals: Vec<u64> = values.iter().map(|v| v >> shift).collect();
            let max = vals.iter().copied().max().unwrap_or(0);
            let iv = IntVector::from_slice(&vals, max);
            prop_assert_eq!(iv.iter().collect::<Vec<_>>(), vals);
        }
    }
}
