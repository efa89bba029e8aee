//! Bit strings.
//!
//! Every codec in this crate works on MSB-first bit strings. `Bits` is a thin
//! wrapper around `Vec<bool>` with helpers for packing fixed-width unsigned and
//! two's-complement fields, plus hex conversion for the replay text format.

use std::fmt;
use std::ops::{Deref, DerefMut};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BitsError {
    #[error("invalid hex digit {0:?}")]
    BadHex(char),
    #[error("bit count {bits} does not fit in {hex_digits} hex digits")]
    BadLength { bits: usize, hex_digits: usize },
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new() -> Self {
        Bits(Vec::new())
    }

    pub fn with_capacity(n: usize) -> Self {
        Bits(Vec::with_capacity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Bits(vec![false; n])
    }

    pub fn from_bools(v: Vec<bool>) -> Self {
        Bits(v)
    }

    /// Parses a string of `0`/`1` characters. Other characters are skipped.
    pub fn from_bit_str(s: &str) -> Self {
        Bits(s.chars().filter_map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        }).collect())
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut b = Bits::with_capacity(bytes.len() * 8);
        for &byte in bytes {
            b.push_uint(byte as u64, 8);
        }
        b
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_uint(&mut self, value: u64, width: usize) {
        debug_assert!(width <= 64);
        for i in (0..width).rev() {
            self.0.push((value >> i) & 1 == 1);
        }
    }

    /// Appends a signed value in `width`-bit two's complement.
    pub fn push_int(&mut self, value: i64, width: usize) {
        let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        self.push_uint(value as u64 & mask, width);
    }

    pub fn push_bits(&mut self, other: &[bool]) {
        self.0.extend_from_slice(other);
    }

    /// Reads `width` bits starting at `offset` as an unsigned integer.
    /// Bits past the end read as zero.
    pub fn uint(&self, offset: usize, width: usize) -> u64 {
        read_uint(&self.0, offset, width)
    }

    pub fn int(&self, offset: usize, width: usize) -> i64 {
        sign_extend(self.uint(offset, width), width)
    }

    /// Overwrites `width` bits at `offset` with `value`, growing if needed.
    pub fn set_uint(&mut self, offset: usize, width: usize, value: u64) {
        if self.0.len() < offset + width {
            self.0.resize(offset + width, false);
        }
        for i in 0..width {
            self.0[offset + i] = (value >> (width - 1 - i)) & 1 == 1;
        }
    }

    /// Packs into bytes, zero-padding the final byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0
            .chunks(8)
            .map(|c| {
                c.iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)))
            })
            .collect()
    }

    /// Uppercase hex, zero-padding the final nibble.
    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.0.len().div_ceil(4));
        for chunk in self.0.chunks(4) {
            let mut v = 0u8;
            for (i, &b) in chunk.iter().enumerate() {
                v |= (b as u8) << (3 - i);
            }
            s.push(char::from_digit(v as u32, 16).unwrap().to_ascii_uppercase());
        }
        s
    }

    /// Parses hex text. With `nbits = None` every digit contributes four bits;
    /// otherwise the result is truncated to `nbits`, which must fit.
    pub fn from_hex(s: &str, nbits: Option<usize>) -> Result<Self, BitsError> {
        let mut b = Bits::with_capacity(s.len() * 4);
        for c in s.chars() {
            let v = c.to_digit(16).ok_or(BitsError::BadHex(c))?;
            b.push_uint(v as u64, 4);
        }
        if let Some(n) = nbits {
            if n > b.len() || b.len() - n >= 4 {
                return Err(BitsError::BadLength { bits: n, hex_digits: s.len() });
            }
            b.0.truncate(n);
        }
        Ok(b)
    }

    pub fn into_inner(self) -> Vec<bool> {
        self.0
    }
}

pub fn read_uint(bits: &[bool], offset: usize, width: usize) -> u64 {
    let mut v = 0u64;
    for i in 0..width {
        v = (v << 1) | bits.get(offset + i).copied().unwrap_or(false) as u64;
    }
    v
}

pub fn sign_extend(v: u64, width: usize) -> i64 {
    if width == 0 || width >= 64 {
        return v as i64;
    }
    let shift = 64 - width;
    ((v << shift) as i64) >> shift
}

impl Deref for Bits {
    type Target = Vec<bool>;
    fn deref(&self) -> &Vec<bool> {
        &self.0
    }
}

impl DerefMut for Bits {
    fn deref_mut(&mut self) -> &mut Vec<bool> {
        &mut self.0
    }
}

impl From<Vec<bool>> for Bits {
    fn from(v: Vec<bool>) -> Self {
        Bits(v)
    }
}

impl FromIterator<bool> for Bits {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Bits(iter.into_iter().collect())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits[{}](", self.0.len())?;
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_and_read_fields() {
        let mut b = Bits::new();
        b.push_uint(0b101, 3);
        b.push_int(-2, 4);
        assert_eq!(b.to_string(), "1011110");
        assert_eq!(b.uint(0, 3), 5);
        assert_eq!(b.int(3, 4), -2);
    }

    #[test]
    fn hex_with_partial_nibble() {
        let b = Bits::from_bit_str("101101");
        assert_eq!(b.to_hex(), "B4");
        assert_eq!(Bits::from_hex("B4", Some(6)).unwrap(), b);
        assert!(Bits::from_hex("B4", Some(2)).is_err());
        assert!(Bits::from_hex("G0", None).is_err());
    }

    #[test]
    fn bytes_roundtrip() {
        let bytes = [0x8D, 0x48, 0x40, 0xD6];
        assert_eq!(Bits::from_bytes(&bytes).to_bytes(), bytes);
    }

    #[test]
    fn set_uint_grows() {
        let mut b = Bits::zeros(4);
        b.set_uint(2, 4, 0xF);
        assert_eq!(b.to_string(), "001111");
    }
}
