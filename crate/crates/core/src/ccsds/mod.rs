//! CCSDS space packets and malformed packet sequences.

pub mod sequence;

use thiserror::Error;

use crate::diag::{Diagnosis, Issue};

pub use sequence::{build_dos_sequence, Mutation, PacketSequence, SequenceEntry};

pub const HEADER_BYTES: usize = 6;
pub const MAX_PAYLOAD: usize = 65_536;
pub const MAX_APID: u16 = 0x7FF;
pub const MAX_SEQ_COUNT: u16 = 0x3FFF;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CcsdsError {
    #[error("payload must be 1..=65536 bytes, got {0}")]
    PayloadLength(usize),
    #[error("{field} value {value} exceeds {bits} bits")]
    FieldWidth { field: &'static str, value: u32, bits: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacketType {
    Telemetry,
    Telecommand,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpacePacket {
    pub version: u8,
    pub packet_type: PacketType,
    pub sec_hdr_flag: bool,
    pub apid: u16,
    pub seq_flags: u8,
    pub seq_count: u16,
    pub payload: Vec<u8>,
}

impl SpacePacket {
    /// Unsegmented telecommand with the given APID and payload.
    pub fn telecommand(apid: u16, seq_count: u16, payload: Vec<u8>) -> Self {
        SpacePacket {
            version: 0,
            packet_type: PacketType::Telecommand,
            sec_hdr_flag: false,
            apid,
            seq_flags: 0b11,
            seq_count,
            payload,
        }
    }

    pub fn length_field(&self) -> u16 {
        self.payload.len().wrapping_sub(1) as u16
    }

    pub fn header(&self) -> [u8; HEADER_BYTES] {
        let w0 = (self.version as u16 & 0x7) << 13
            | ((self.packet_type == PacketType::Telecommand) as u16) << 12
            | (self.sec_hdr_flag as u16) << 11
            | (self.apid & MAX_APID);
        let w1 = (self.seq_flags as u16 & 0x3) << 14 | (self.seq_count & MAX_SEQ_COUNT);
        let [a, b] = w0.to_be_bytes();
        let [c, d] = w1.to_be_bytes();
        let [e, f] = self.length_field().to_be_bytes();
        [a, b, c, d, e, f]
    }
}

pub fn encode_packet(p: &SpacePacket) -> Result<Vec<u8>, CcsdsError> {
    if p.payload.is_empty() || p.payload.len() > MAX_PAYLOAD {
        return Err(CcsdsError::PayloadLength(p.payload.len()));
    }
    let check = |field, value: u32, bits: u8| {
        if value >> bits != 0 {
            Err(CcsdsError::FieldWidth { field, value, bits })
        } else {
            Ok(())
        }
    };
    check("version", p.version as u32, 3)?;
    check("apid", p.apid as u32, 11)?;
    check("seq_flags", p.seq_flags as u32, 2)?;
    check("seq_count", p.seq_count as u32, 14)?;
    Ok(encode_unchecked(p))
}

/// Packs whatever is in `p`; fields are masked to width. Used for malformed output.
pub fn encode_unchecked(p: &SpacePacket) -> Vec<u8> {
    let mut out = p.header().to_vec();
    out.extend_from_slice(&p.payload);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedPacket {
    pub packet: Option<SpacePacket>,
    pub length_field: Option<u16>,
    pub diagnosis: Diagnosis,
}

/// Parses a packet. Lenient mode returns whatever payload bytes are present.
pub fn decode_packet(bytes: &[u8], lenient: bool) -> DecodedPacket {
    let mut diagnosis = Diagnosis::default();
    if bytes.len() < HEADER_BYTES {
        diagnosis.push(Issue::Truncated);
        return DecodedPacket { packet: None, length_field: None, diagnosis };
    }
    let w0 = u16::from_be_bytes([bytes[0], bytes[1]]);
    let w1 = u16::from_be_bytes([bytes[2], bytes[3]]);
    let length_field = u16::from_be_bytes([bytes[4], bytes[5]]);
    let version = (w0 >> 13) as u8;
    if version != 0 {
        diagnosis.push(Issue::BadVersion);
    }
    let declared = length_field as usize + 1;
    let available = bytes.len() - HEADER_BYTES;
    if available < declared {
        diagnosis.push(Issue::Truncated);
    }
    if available != declared {
        diagnosis.push(Issue::LengthMismatch);
    }
    let packet = SpacePacket {
        version,
        packet_type: if w0 >> 12 & 1 == 1 { PacketType::Telecommand } else { PacketType::Telemetry },
        sec_hdr_flag: w0 >> 11 & 1 == 1,
        apid: w0 & MAX_APID,
        seq_flags: (w1 >> 14) as u8,
        seq_count: w1 & MAX_SEQ_COUNT,
        payload: bytes[HEADER_BYTES..HEADER_BYTES + available.min(declared)].to_vec(),
    };
    let packet = (lenient || diagnosis.is_empty()).then_some(packet);
    DecodedPacket { packet, length_field: Some(length_field), diagnosis }
}

pub fn describe(p: &SpacePacket) -> String {
    format!(
        "v{} {} apid={:#05x} seq_flags={} seq={} len={}",
        p.version,
        match p.packet_type {
            PacketType::Telemetry => "TM",
            PacketType::Telecommand => "TC",
        },
        p.apid,
        p.seq_flags,
        p.seq_count,
        p.payload.len()
    )
}
