//! 6-bit payload armoring and the 6-bit text alphabet.

use thiserror::Error;

use crate::bits::Bits;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArmorError {
    #[error("character {0:?} is outside the armoring alphabet")]
    BadChar(char),
    #[error("fill bit count {0} is not in 0..=5")]
    BadFill(u8),
}

pub fn armor_char(v: u8) -> char {
    debug_assert!(v < 64);
    if v < 40 {
        (48 + v) as char
    } else {
        (56 + v) as char
    }
}

pub fn dearmor_char(c: char) -> Result<u8, ArmorError> {
    let code = c as u32;
    match code {
        48..=87 => Ok((code - 48) as u8),
        96..=119 => Ok((code - 56) as u8),
        _ => Err(ArmorError::BadChar(c)),
    }
}

/// Armors `bits`, zero-padding to a multiple of six. Returns the text and the
/// number of fill bits added.
pub fn armor_6bit(bits: &[bool]) -> (String, u8) {
    let fill = ((6 - bits.len() % 6) % 6) as u8;
    let text = bits
        .chunks(6)
        .map(|c| {
            let v = (0..6).fold(0u8, |acc, i| (acc << 1) | *c.get(i).unwrap_or(&false) as u8);
            armor_char(v)
        })
        .collect();
    (text, fill)
}

pub fn dearmor_6bit(text: &str, fill: u8) -> Result<Bits, ArmorError> {
    if fill > 5 {
        return Err(ArmorError::BadFill(fill));
    }
    let mut bits = Bits::with_capacity(text.len() * 6);
    for c in text.chars() {
        bits.push_uint(dearmor_char(c)? as u64, 6);
    }
    let keep = bits.len().saturating_sub(fill as usize);
    bits.truncate(keep);
    Ok(bits)
}

/// 6-bit text code for `c`: `@`..`_` map to 0..31, space..`?` to 32..63.
pub fn text_code(c: char) -> Option<u8> {
    match c as u32 {
        64..=95 => Some(c as u8 - 64),
        32..=63 => Some(c as u8),
        _ => None,
    }
}

pub fn text_char(v: u8) -> char {
    let v = v & 0x3F;
    if v < 32 {
        (v + 64) as char
    } else {
        v as char
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn armor_table_arithmetic() {
        let (s, fill) = armor_6bit(&Bits::from_bit_str("000001"));
        assert_eq!((s.as_str(), fill), ("1", 0));
        assert_eq!(armor_char(40), '`');
        assert_eq!(armor_char(39), 'W');
        assert_eq!(armor_char(63), 'w');
    }

    #[test]
    fn dearmor_inverts_all_64_values() {
        for v in 0..64u8 {
            let c = armor_char(v);
            assert_eq!(c as u32, if v < 40 { 48 + v as u32 } else { 56 + v as u32 });
            assert_eq!(dearmor_char(c).unwrap(), v);
        }
        assert_eq!(dearmor_char('X'), Err(ArmorError::BadChar('X')));
        assert_eq!(dearmor_char('x'), Err(ArmorError::BadChar('x')));
    }

    #[test]
    fn fill_bits_reported() {
        let bits = Bits::from_bit_str("1010101");
        let (s, fill) = armor_6bit(&bits);
        assert_eq!(fill, 5);
        assert_eq!(dearmor_6bit(&s, fill).unwrap(), bits);
        assert!(dearmor_6bit(&s, 6).is_err());
    }

    #[test]
    fn text_alphabet() {
        assert_eq!(text_code('@'), Some(0));
        assert_eq!(text_code('A'), Some(1));
        assert_eq!(text_code(' '), Some(32));
        assert_eq!(text_code('?'), Some(63));
        assert_eq!(text_code('a'), None);
        for v in 0..64 {
            assert_eq!(text_code(text_char(v)), Some(v));
        }
    }
}
