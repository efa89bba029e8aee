//! AIS air-interface framing: training sequence, HDLC flags, bit stuffing,
//! CRC-16 and NRZI.
//!
//! Data bytes go on air least significant bit first. The FCS is the HDLC
//! CRC-16 (polynomial 0x1021 in reflected form, preset 0xFFFF, complemented)
//! over the transmitted bit order, itself sent low bit first.

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::diag::{Diagnosis, Issue};

pub const FLAG: [bool; 8] = [false, true, true, true, true, true, true, false];
pub const DEFAULT_TRAINING_BITS: usize = 24;
pub const MAX_TRAINING_BITS: usize = 64;
pub const DEFAULT_BUFFER_BITS: usize = 8;

/// Alternating training sequence. Normal phase starts with 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrainingPattern {
    pub length: usize,
    #[serde(default)]
    pub inverted: bool,
}

impl Default for TrainingPattern {
    fn default() -> Self {
        TrainingPattern { length: DEFAULT_TRAINING_BITS, inverted: false }
    }
}

impl TrainingPattern {
    pub fn bits(&self) -> Bits {
        (0..self.length.min(MAX_TRAINING_BITS)).map(|i| (i % 2 == 1) ^ self.inverted).collect()
    }

    /// Lengths 0-32 in steps of 4, both phases.
    pub fn default_sweep() -> Vec<TrainingPattern> {
        let mut v = Vec::new();
        for length in (0..=32).step_by(4) {
            for inverted in [false, true] {
                if length == 0 && inverted {
                    continue;
                }
                v.push(TrainingPattern { length, inverted });
            }
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AirFrameOptions {
    #[serde(default)]
    pub training: TrainingPattern,
    #[serde(default)]
    pub invert_crc: bool,
    #[serde(default)]
    pub omit_stuffing: bool,
    #[serde(default = "default_buffer")]
    pub buffer_bits: usize,
}

fn default_buffer() -> usize {
    DEFAULT_BUFFER_BITS
}

impl Default for AirFrameOptions {
    fn default() -> Self {
        AirFrameOptions {
            training: TrainingPattern::default(),
            invert_crc: false,
            omit_stuffing: false,
            buffer_bits: DEFAULT_BUFFER_BITS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AisAirFrame {
    pub training: Bits,
    /// Stuffed data and FCS, between the flags.
    pub payload_bits: Bits,
    pub buffer_bits: Bits,
}

impl AisAirFrame {
    /// Training, start flag, payload, end flag, buffer. This is the bit
    /// stream before NRZI.
    pub fn to_bits(&self) -> Bits {
        let mut b = Bits::with_capacity(self.training.len() + self.payload_bits.len() + 16 + self.buffer_bits.len());
        b.push_bits(&self.training);
        b.push_bits(&FLAG);
        b.push_bits(&self.payload_bits);
        b.push_bits(&FLAG);
        b.push_bits(&self.buffer_bits);
        b
    }
}

pub fn crc16_bits(bits: &[bool]) -> u16 {
    let mut crc: u16 = 0xFFFF;
    for &b in bits {
        if ((crc & 1) != 0) ^ b {
            crc = (crc >> 1) ^ 0x8408;
        } else {
            crc >>= 1;
        }
    }
    !crc
}

/// Message bits (MSB-first fields) to air order: zero-padded to whole bytes,
/// each byte reversed.
pub fn to_air_order(data: &[bool]) -> Bits {
    let padded_len = data.len().div_ceil(8) * 8;
    let mut out = Bits::with_capacity(padded_len);
    for byte in 0..padded_len / 8 {
        for i in (0..8).rev() {
            out.push(data.get(byte * 8 + i).copied().unwrap_or(false));
        }
    }
    out
}

/// Inverse of `to_air_order`; trailing partial bytes are dropped.
pub fn from_air_order(air: &[bool]) -> Bits {
    let mut out = Bits::with_capacity(air.len());
    for chunk in air.chunks_exact(8) {
        for i in (0..8).rev() {
            out.push(chunk[i]);
        }
    }
    out
}

pub fn stuff(bits: &[bool]) -> Bits {
    let mut out = Bits::with_capacity(bits.len() + bits.len() / 5);
    let mut ones = 0;
    for &b in bits {
        out.push(b);
        if b {
            ones += 1;
            if ones == 5 {
                out.push(false);
                ones = 0;
            }
        } else {
            ones = 0;
        }
    }
    out
}

/// Removes stuffed zeros. Returns `None` on six consecutive ones.
pub fn unstuff(bits: &[bool]) -> Option<Bits> {
    let mut out = Bits::with_capacity(bits.len());
    let mut ones = 0;
    let mut iter = bits.iter();
    while let Some(&b) = iter.next() {
        out.push(b);
        if b {
            ones += 1;
            if ones == 5 {
                match iter.next() {
                    Some(false) | None => {}
                    Some(true) => return None,
                }
                ones = 0;
            }
        } else {
            ones = 0;
        }
    }
    Some(out)
}

/// NRZI as used on AIS: a 0 toggles the line level, a 1 keeps it. The line
/// idles high before the first bit.
pub fn nrzi_encode(bits: &[bool]) -> Bits {
    let mut level = true;
    bits.iter()
        .map(|&b| {
            if !b {
                level = !level;
            }
            level
        })
        .collect()
}

pub fn nrzi_decode(line: &[bool]) -> Bits {
    let mut prev = true;
    line.iter()
        .map(|&l| {
            let bit = l == prev;
            prev = l;
            bit
        })
        .collect()
}

/// Frames already-ordered message bits.
pub fn build_air_frame(data: &[bool], opts: &AirFrameOptions) -> AisAirFrame {
    let mut body = to_air_order(data);
    let mut fcs = crc16_bits(&body);
    if opts.invert_crc {
        fcs = !fcs;
    }
    for i in 0..16 {
        body.push((fcs >> i) & 1 == 1);
    }
    let payload_bits = if opts.omit_stuffing { body } else { stuff(&body) };
    AisAirFrame {
        training: opts.training.bits(),
        payload_bits,
        buffer_bits: Bits::zeros(opts.buffer_bits),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deframed {
    /// Alternating run immediately preceding the start flag.
    pub training: Bits,
    /// Message bits in field order; present unless framing failed outright.
    pub data: Option<Bits>,
    pub diagnosis: Diagnosis,
}

fn find_flag(bits: &[bool], from: usize) -> Option<usize> {
    if bits.len() < 8 {
        return None;
    }
    (from..=bits.len() - 8).find(|&i| bits[i..i + 8] == FLAG)
}

fn trailing_alternation(bits: &[bool]) -> Bits {
    let mut start = bits.len();
    while start > 0 && (start == bits.len() || bits[start - 1] != bits[start]) {
        start -= 1;
    }
    Bits::from_bools(bits[start..].to_vec())
}

/// Locates and checks one HDLC frame in a pre-NRZI bit stream. Total: any
/// input yields a diagnosis rather than a failure. With `lenient`, data that
/// fails the FCS check is still returned.
pub fn deframe(bits: &[bool], lenient: bool) -> Deframed {
    let mut diagnosis = Diagnosis::default();
    let Some(start) = find_flag(bits, 0) else {
        diagnosis.push(Issue::NoStartFlag);
        return Deframed { training: Bits::new(), data: None, diagnosis };
    };
    let training = trailing_alternation(&bits[..start]);
    let body_start = start + 8;
    // Skip back-to-back flags.
    let mut body_start = body_start;
    while bits.len() >= body_start + 8 && bits[body_start..body_start + 8] == FLAG {
        body_start += 8;
    }
    // End flag: the first run of six ones, preceded by its leading zero.
    let rest = &bits[body_start.min(bits.len())..];
    let mut run = 0;
    let mut end = None;
    for (i, &b) in rest.iter().enumerate() {
        run = if b { run + 1 } else { 0 };
        if run == 6 {
            end = Some((i + 1).saturating_sub(7));
            break;
        }
    }
    let Some(end) = end.filter(|&e| e < rest.len()) else {
        diagnosis.push(Issue::NoEndFlag);
        return Deframed { training, data: None, diagnosis };
    };
    if rest.get(end + 7) != Some(&false) {
        diagnosis.push(Issue::StuffingViolation);
    }
    let stuffed = &rest[..end];
    let body = match unstuff(stuffed) {
        Some(b) => b,
        None => {
            diagnosis.push(Issue::StuffingViolation);
            return Deframed { training, data: None, diagnosis };
        }
    };
    if body.len() < 24 || body.len() % 8 != 0 {
        diagnosis.push(Issue::WrongLength { expected: 184, got: body.len() });
        if body.len() < 24 {
            return Deframed { training, data: None, diagnosis };
        }
    }
    let whole = body.len() - body.len() % 8;
    let (payload, fcs_bits) = body[..whole].split_at(whole - 16);
    let fcs = fcs_bits.iter().enumerate().fold(0u16, |acc, (i, &b)| acc | ((b as u16) << i));
    if crc16_bits(payload) != fcs {
        diagnosis.push(Issue::CrcFailed);
        if !lenient {
            return Deframed { training, data: None, diagnosis };
        }
    }
    Deframed { training, data: Some(from_air_order(payload)), diagnosis }
}
