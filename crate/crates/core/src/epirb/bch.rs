//! BCH protection fields of the first-generation long message.
//!
//! BCH-1 is the shortened (82,61) code, BCH-2 the shortened (38,26) code. Both
//! are plain systematic remainders: `check = data(x) * x^r mod g(x)`.

use super::EpirbError;
use crate::bits::Bits;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BchCode {
    Bch1,
    Bch2,
}

impl BchCode {
    /// Generator polynomial, MSB = highest power.
    pub const fn generator(self) -> u64 {
        match self {
            BchCode::Bch1 => 0x26_D9E3,
            BchCode::Bch2 => 0x1539,
        }
    }

    pub const fn data_bits(self) -> usize {
        match self {
            BchCode::Bch1 => 61,
            BchCode::Bch2 => 26,
        }
    }

    pub const fn check_bits(self) -> usize {
        match self {
            BchCode::Bch1 => 21,
            BchCode::Bch2 => 12,
        }
    }
}

/// Remainder of `data * x^r` modulo the generator, `data` right-aligned.
pub fn remainder(code: BchCode, data: u64) -> u64 {
    let r = code.check_bits();
    let g = code.generator() as u128;
    let mut v = (data as u128) << r;
    let top = code.data_bits() + r;
    for i in (r..top).rev() {
        if v >> i & 1 == 1 {
            v ^= g << (i - r);
        }
    }
    v as u64
}

pub fn bch_encode(data: &[bool], code: BchCode) -> Result<Bits, EpirbError> {
    if data.len() != code.data_bits() {
        return Err(EpirbError::BchWidth { expected: code.data_bits(), got: data.len() });
    }
    let d = crate::bits::read_uint(data, 0, data.len());
    let mut out = Bits::with_capacity(code.check_bits());
    out.push_uint(remainder(code, d), code.check_bits());
    Ok(out)
}

pub fn bch_verify(data: &[bool], check: &[bool], code: BchCode) -> bool {
    bch_encode(data, code).is_ok_and(|c| *c == *check)
}
