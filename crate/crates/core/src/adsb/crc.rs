//! Mode S CRC-24 (generator 0x1FFF409).

use super::AdsbError;

pub const GENERATOR: u32 = 0x1FF_F409;

const fn build_table() -> [u32; 256] {
    let mut table = [0u32; 256];
    let mut i = 0;
    while i < 256 {
        let mut crc = (i as u32) << 16;
        let mut k = 0;
        while k < 8 {
            crc <<= 1;
            if crc & 0x100_0000 != 0 {
                crc ^= GENERATOR;
            }
            k += 1;
        }
        table[i] = crc & 0xFF_FFFF;
        i += 1;
    }
    table
}

static TABLE: [u32; 256] = build_table();

/// CRC-24 over whole bytes.
pub fn crc24_bytes(data: &[u8]) -> u32 {
    data.iter().fold(0u32, |crc, &b| {
        ((crc << 8) & 0xFF_FFFF) ^ TABLE[(((crc >> 16) as u8) ^ b) as usize]
    })
}

/// Parity for the first 88 bits of an extended squitter.
pub fn crc24(bits: &[bool]) -> Result<u32, AdsbError> {
    if bits.len() != 88 {
        return Err(AdsbError::Length { expected: 88, got: bits.len() });
    }
    let bytes = crate::bits::Bits::from_bools(bits.to_vec()).to_bytes();
    Ok(crc24_bytes(&bytes))
}

/// Remainder of the full 112-bit frame; zero for an intact frame.
pub fn frame_remainder(raw: &[u8; 14]) -> u32 {
    let parity = ((raw[11] as u32) << 16) | ((raw[12] as u32) << 8) | raw[13] as u32;
    crc24_bytes(&raw[..11]) ^ parity
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_dividend() {
        assert_eq!(crc24(&[false; 88]).unwrap(), 0);
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(matches!(crc24(&[false; 87]), Err(AdsbError::Length { expected: 88, got: 87 })));
    }
}
