//! 406 MHz distress beacon messages, first-generation long format (144 bits).
//!
//! Bit numbers in comments follow the usual 1-based beacon numbering; code uses
//! 0-based indices, so bit `n` lives at index `n - 1`.

pub mod baudot;
pub mod bch;

use std::fmt::Write as _;

use thiserror::Error;

use crate::bits::Bits;
use crate::diag::{Diagnosis, Issue};
pub use bch::{bch_encode, bch_verify, BchCode};

pub const LONG_MESSAGE_BITS: usize = 144;
pub const SHORT_MESSAGE_BITS: usize = 112;
pub const FRAME_SYNC_NORMAL: u64 = 0b000101111;
pub const FRAME_SYNC_SELF_TEST: u64 = 0b011010000;

const PDF1: usize = 24;
const BCH1: usize = 85;
const PDF2: usize = 106;
const BCH2: usize = 132;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EpirbError {
    #[error("{0} does not fit its protocol field")]
    IdentityOverflow(String),
    #[error("country code {0} does not fit in 10 bits")]
    CountryCode(u16),
    #[error("mmsi country digits {mid} differ from country code {country}")]
    MidMismatch { mid: u32, country: u16 },
    #[error("position ({0}, {1}) out of range")]
    Position(f64, f64),
    #[error("short-format messages are not encodable")]
    ShortFormat,
    #[error("BCH data must be {expected} bits, got {got}")]
    BchWidth { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageFormat {
    Short,
    Long,
}

/// User protocols carry a coarse position in PDF-2; standard-location
/// protocols carry a quarter-degree position in PDF-1 plus offsets in PDF-2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocationScheme {
    User,
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeaconProtocol {
    MaritimeMmsi,
    AviationIcao24,
    SerialPlb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    Mmsi { mmsi: u32, beacon_number: u8 },
    Icao24(u32),
    Serial { serial: u32, cert: u16 },
}

impl Identity {
    pub fn protocol(&self) -> BeaconProtocol {
        match self {
            Identity::Mmsi { .. } => BeaconProtocol::MaritimeMmsi,
            Identity::Icao24(_) => BeaconProtocol::AviationIcao24,
            Identity::Serial { .. } => BeaconProtocol::SerialPlb,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeaconMessage {
    pub self_test: bool,
    pub format: MessageFormat,
    pub scheme: LocationScheme,
    pub country_code: u16,
    pub identity: Identity,
    /// Degrees, (lat, lon).
    pub position: Option<(f64, f64)>,
    /// Position from an internal navigation device.
    pub internal_nav: bool,
    pub homing_121_5: bool,
}

impl BeaconMessage {
    /// Maritime beacon; the country code is the MMSI's leading three digits.
    pub fn maritime(mmsi: u32, beacon_number: u8, position: Option<(f64, f64)>) -> Self {
        BeaconMessage {
            self_test: false,
            format: MessageFormat::Long,
            scheme: LocationScheme::User,
            country_code: (mmsi / 1_000_000) as u16,
            identity: Identity::Mmsi { mmsi, beacon_number },
            position,
            internal_nav: position.is_some(),
            homing_121_5: true,
        }
    }

    pub fn elt(country_code: u16, icao24: u32, position: Option<(f64, f64)>) -> Self {
        BeaconMessage {
            identity: Identity::Icao24(icao24),
            country_code,
            ..Self::maritime(0, 0, position)
        }
    }

    pub fn plb(country_code: u16, serial: u32, cert: u16, position: Option<(f64, f64)>) -> Self {
        BeaconMessage {
            identity: Identity::Serial { serial, cert },
            country_code,
            ..Self::maritime(0, 0, position)
        }
    }

    pub fn protocol(&self) -> BeaconProtocol {
        self.identity.protocol()
    }

    /// Grid resolution of the encoded position, in degrees.
    pub fn position_resolution(&self) -> f64 {
        match self.scheme {
            LocationScheme::User => 1.0 / 15.0,
            LocationScheme::Standard => 0.25,
        }
    }
}

/// Raw protected fields of a long message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BeaconFields {
    pub pdf1: u64,
    pub bch1: u32,
    pub pdf2: u32,
    pub bch2: u16,
}

fn push_baudot(b: &mut Bits, s: &str) {
    for c in s.chars() {
        b.push_uint(baudot::encode_char(c).expect("digits are in the table") as u64, 6);
    }
}

fn validate(m: &BeaconMessage) -> Result<(), EpirbError> {
    if m.format == MessageFormat::Short {
        return Err(EpirbError::ShortFormat);
    }
    if m.country_code >= 1024 {
        return Err(EpirbError::CountryCode(m.country_code));
    }
    let over = |what: String| Err(EpirbError::IdentityOverflow(what));
    match (m.identity, m.scheme) {
        (Identity::Mmsi { mmsi, beacon_number }, scheme) => {
            if mmsi >= 1_000_000_000 {
                return over(format!("mmsi {mmsi}"));
            }
            if mmsi / 1_000_000 != m.country_code as u32 {
                return Err(EpirbError::MidMismatch { mid: mmsi / 1_000_000, country: m.country_code });
            }
            let max = if scheme == LocationScheme::User { 9 } else { 15 };
            if beacon_number > max {
                return over(format!("beacon number {beacon_number}"));
            }
        }
        (Identity::Icao24(a), _) if a >= 1 << 24 => return over(format!("icao24 {a:#x}")),
        (Identity::Serial { serial, cert }, LocationScheme::User) if serial >= 1 << 20 || cert >= 1 << 10 => {
            return over(format!("serial {serial} / cert {cert}"))
        }
        (Identity::Serial { serial, cert }, LocationScheme::Standard) if serial >= 1 << 14 || cert >= 1 << 10 => {
            return over(format!("serial {serial} / cert {cert}"))
        }
        _ => {}
    }
    if let Some((lat, lon)) = m.position {
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return Err(EpirbError::Position(lat, lon));
        }
    }
    Ok(())
}

/// Quantizes |v| to `steps` per degree: (sign, whole degrees, remaining steps).
fn grid(v: f64, steps: f64) -> (bool, u64, u64) {
    let q = (v.abs() * steps).round() as u64;
    (v < 0.0 && q > 0, q / steps as u64, q % steps as u64)
}

fn pdf1_bits(m: &BeaconMessage) -> Bits {
    let mut b = Bits::with_capacity(61);
    b.push_uint(1, 1); // long format
    b.push_uint((m.scheme == LocationScheme::User) as u64, 1);
    b.push_uint(m.country_code as u64, 10);
    match m.scheme {
        LocationScheme::User => {
            match m.identity {
                Identity::Mmsi { mmsi, beacon_number } => {
                    b.push_uint(0b010, 3);
                    push_baudot(&mut b, &format!("{:06}", mmsi % 1_000_000));
                    push_baudot(&mut b, &beacon_number.to_string());
                    b.push_uint(0, 2);
                }
                Identity::Icao24(addr) => {
                    b.push_uint(0b011, 3);
                    b.push_uint(0b011, 3);
                    b.push_uint(0, 1);
                    b.push_uint(addr as u64, 24);
                    b.push_uint(0, 6); // additional ELTs
                    b.push_uint(0, 10);
                }
                Identity::Serial { serial, cert } => {
                    b.push_uint(0b011, 3);
                    b.push_uint(0b110, 3);
                    b.push_uint(1, 1); // approval certificate present
                    b.push_uint(serial as u64, 20);
                    b.push_uint(0, 10);
                    b.push_uint(cert as u64, 10);
                }
            }
            b.push_uint(m.homing_121_5 as u64, 2);
        }
        LocationScheme::Standard => {
            match m.identity {
                Identity::Mmsi { mmsi, beacon_number } => {
                    b.push_uint(0b0010, 4);
                    b.push_uint((mmsi % 1_000_000) as u64, 20);
                    b.push_uint(beacon_number as u64, 4);
                }
                Identity::Icao24(addr) => {
                    b.push_uint(0b0011, 4);
                    b.push_uint(addr as u64, 24);
                }
                Identity::Serial { serial, cert } => {
                    b.push_uint(0b0111, 4);
                    b.push_uint(cert as u64, 10);
                    b.push_uint(serial as u64, 14);
                }
            }
            match m.position {
                Some((lat, lon)) => {
                    let q = |v: f64| (v.abs() * 4.0).round() as u64;
                    b.push_uint((lat < 0.0 && q(lat) > 0) as u64, 1);
                    b.push_uint(q(lat), 9);
                    b.push_uint((lon < 0.0 && q(lon) > 0) as u64, 1);
                    b.push_uint(q(lon), 10);
                }
                None => {
                    b.push_uint(0b0_111111111, 10);
                    b.push_uint(0b1_1111111111, 11);
                }
            }
        }
    }
    debug_assert_eq!(b.len(), 61);
    b
}

const OFFSET_DEFAULT: u64 = 0b0_11111_1111;

fn pdf2_bits(m: &BeaconMessage) -> Bits {
    let mut b = Bits::with_capacity(26);
    match m.scheme {
        LocationScheme::User => {
            b.push_uint(m.internal_nav as u64, 1);
            match m.position {
                Some((lat, lon)) => {
                    let (s, d, q) = grid(lat, 15.0);
                    b.push_uint(s as u64, 1);
                    b.push_uint(d, 7);
                    b.push_uint(q, 4);
                    let (s, d, q) = grid(lon, 15.0);
                    b.push_uint(s as u64, 1);
                    b.push_uint(d, 8);
                    b.push_uint(q, 4);
                }
                None => {
                    b.push_uint(0b0_1111111_1111, 12);
                    b.push_uint(0b1_11111111_1111, 13);
                }
            }
        }
        LocationScheme::Standard => {
            b.push_uint(0b1101, 4);
            b.push_uint(m.internal_nav as u64, 1);
            b.push_uint(m.homing_121_5 as u64, 1);
            // Refinement offsets are left at zero (sign bit 1 = positive).
            let off = if m.position.is_some() { 0b1_00000_0000 } else { OFFSET_DEFAULT };
            b.push_uint(off, 10);
            b.push_uint(off, 10);
        }
    }
    debug_assert_eq!(b.len(), 26);
    b
}

/// Assembles a long message from raw protected fields, computing both BCH
/// fields. No validation beyond widths; this is the raw bypass used by fuzzers.
pub fn encode_raw(pdf1: u64, pdf2: u32, self_test: bool) -> Bits {
    let pdf1 = pdf1 & ((1 << 61) - 1);
    let pdf2 = pdf2 as u64 & ((1 << 26) - 1);
    let mut b = Bits::with_capacity(LONG_MESSAGE_BITS);
    b.push_uint(0x7FFF, 15);
    b.push_uint(if self_test { FRAME_SYNC_SELF_TEST } else { FRAME_SYNC_NORMAL }, 9);
    b.push_uint(pdf1, 61);
    b.push_uint(bch::remainder(BchCode::Bch1, pdf1), 21);
    b.push_uint(pdf2, 26);
    b.push_uint(bch::remainder(BchCode::Bch2, pdf2), 12);
    b
}

pub fn encode_beacon(m: &BeaconMessage) -> Result<Bits, EpirbError> {
    validate(m)?;
    let p1 = pdf1_bits(m);
    let p2 = pdf2_bits(m);
    Ok(encode_raw(p1.uint(0, 61), p2.uint(0, 26) as u32, m.self_test))
}

pub fn fields(bits: &[bool]) -> Option<BeaconFields> {
    (bits.len() == LONG_MESSAGE_BITS).then(|| {
        let r = |o, w| crate::bits::read_uint(bits, o, w);
        BeaconFields {
            pdf1: r(PDF1, 61),
            bch1: r(BCH1, 21) as u32,
            pdf2: r(PDF2, 26) as u32,
            bch2: r(BCH2, 12) as u16,
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedBeacon {
    pub message: Option<BeaconMessage>,
    pub fields: Option<BeaconFields>,
    pub diagnosis: Diagnosis,
}

fn baudot_digits(b: &Bits, offset: usize, n: usize) -> Option<u32> {
    let mut v = 0u32;
    for i in 0..n {
        let d = baudot::decode_char(b.uint(offset + 6 * i, 6) as u8)?.to_digit(10)?;
        v = v * 10 + d;
    }
    Some(v)
}

fn parse_message(b: &Bits, diag: &mut Diagnosis) -> Option<BeaconMessage> {
    if b.uint(PDF1, 1) == 0 {
        diag.push(Issue::ShortFormat);
        return None;
    }
    let user = b.uint(25, 1) == 1;
    let country_code = b.uint(26, 10) as u16;
    let self_test = b.uint(15, 9) == FRAME_SYNC_SELF_TEST;
    let homing_121_5;
    let mut position = None;
    let internal_nav;
    let identity = if user {
        homing_121_5 = b.uint(83, 2) == 1;
        let identity = match b.uint(36, 3) {
            0b010 => {
                let trailing = baudot_digits(b, 39, 6);
                let beacon_number = baudot_digits(b, 75, 1);
                let (Some(t), Some(n)) = (trailing, beacon_number) else {
                    diag.field("mmsi");
                    return None;
                };
                Identity::Mmsi { mmsi: country_code as u32 * 1_000_000 + t, beacon_number: n as u8 }
            }
            0b011 => match b.uint(39, 3) {
                0b011 => Identity::Icao24(b.uint(43, 24) as u32),
                0b110 => Identity::Serial { serial: b.uint(43, 20) as u32, cert: b.uint(73, 10) as u16 },
                other => {
                    diag.push(Issue::UnknownProtocol(other as u8));
                    return None;
                }
            },
            other => {
                diag.push(Issue::UnknownProtocol(other as u8));
                return None;
            }
        };
        internal_nav = b.uint(PDF2, 1) == 1;
        let (ls, ld, lq) = (b.uint(107, 1), b.uint(108, 7), b.uint(115, 4));
        let (os, od, oq) = (b.uint(119, 1), b.uint(120, 8), b.uint(128, 4));
        if ld <= 90 && od <= 180 && lq < 15 && oq < 15 {
            let v = |s: u64, d: u64, q: u64| (d as f64 + q as f64 / 15.0) * if s == 1 { -1.0 } else { 1.0 };
            position = Some((v(ls, ld, lq), v(os, od, oq)));
        }
        identity
    } else {
        let identity = match b.uint(36, 4) {
            0b0010 => {
                let t = b.uint(40, 20) as u32;
                if t >= 1_000_000 {
                    diag.field("mmsi");
                }
                Identity::Mmsi { mmsi: country_code as u32 * 1_000_000 + t % 1_000_000, beacon_number: b.uint(60, 4) as u8 }
            }
            0b0011 => Identity::Icao24(b.uint(40, 24) as u32),
            0b0111 => Identity::Serial { cert: b.uint(40, 10) as u16, serial: b.uint(50, 14) as u32 },
            other => {
                diag.push(Issue::UnknownProtocol(other as u8));
                return None;
            }
        };
        if b.uint(PDF2, 4) != 0b1101 {
            diag.field("pdf2_fixed");
        }
        internal_nav = b.uint(110, 1) == 1;
        homing_121_5 = b.uint(111, 1) == 1;
        let (lat_q, lon_q) = (b.uint(65, 9), b.uint(75, 10));
        if lat_q <= 360 && lon_q <= 720 {
            let offset = |o: usize| {
                let v = b.uint(o, 10);
                if v == OFFSET_DEFAULT {
                    return 0.0;
                }
                let mag = b.uint(o + 1, 5) as f64 / 60.0 + b.uint(o + 6, 4) as f64 * 4.0 / 3600.0;
                if v >> 9 == 1 { mag } else { -mag }
            };
            let sign = |bit: usize| if b.uint(bit, 1) == 1 { -1.0 } else { 1.0 };
            // Offsets refine the magnitude away from or toward zero.
            let lat = sign(64) * (lat_q as f64 / 4.0 + offset(112));
            let lon = sign(74) * (lon_q as f64 / 4.0 + offset(122));
            position = Some((lat, lon));
        }
        identity
    };
    Some(BeaconMessage {
        self_test,
        format: MessageFormat::Long,
        scheme: if user { LocationScheme::User } else { LocationScheme::Standard },
        country_code,
        identity,
        position,
        internal_nav,
        homing_121_5,
    })
}

/// Decodes a message. Total; strict mode withholds the message on any
/// integrity failure.
pub fn decode_beacon(bits: &[bool], lenient: bool) -> DecodedBeacon {
    let mut diagnosis = Diagnosis::default();
    if bits.len() == SHORT_MESSAGE_BITS {
        diagnosis.push(Issue::ShortFormat);
        return DecodedBeacon { message: None, fields: None, diagnosis };
    }
    if bits.len() != LONG_MESSAGE_BITS {
        diagnosis.push(Issue::WrongLength { expected: LONG_MESSAGE_BITS, got: bits.len() });
        return DecodedBeacon { message: None, fields: None, diagnosis };
    }
    let b = Bits::from_bools(bits.to_vec());
    if b.uint(0, 15) != 0x7FFF {
        diagnosis.push(Issue::BadBitSync);
    }
    let sync = b.uint(15, 9);
    if sync != FRAME_SYNC_NORMAL && sync != FRAME_SYNC_SELF_TEST {
        diagnosis.push(Issue::BadFrameSync);
    }
    let f = fields(bits).expect("length checked");
    if bch::remainder(BchCode::Bch1, f.pdf1) != f.bch1 as u64 {
        diagnosis.push(Issue::Bch1Failed);
    }
    if bch::remainder(BchCode::Bch2, f.pdf2 as u64) != f.bch2 as u64 {
        diagnosis.push(Issue::Bch2Failed);
    }
    let message = if !lenient && diagnosis.integrity_failed() {
        None
    } else {
        parse_message(&b, &mut diagnosis)
    };
    DecodedBeacon { message, fields: Some(f), diagnosis }
}

/// 15-hex beacon identifier (bits 26-85, position bits defaulted for the
/// standard-location protocols).
pub fn hex_id(bits: &[bool]) -> Option<String> {
    if bits.len() != LONG_MESSAGE_BITS {
        return None;
    }
    let mut id = Bits::from_bools(bits[25..85].to_vec());
    if id.uint(0, 1) == 0 {
        id.set_uint(39, 21, 0b0_111111111_1_1111111111);
    }
    Some(format!("{:015X}", id.uint(0, 60)))
}

fn fmt_pos((lat, lon): (f64, f64)) -> String {
    format!(
        "{:.4}{} {:.4}{}",
        lat.abs(),
        if lat < 0.0 { 'S' } else { 'N' },
        lon.abs(),
        if lon < 0.0 { 'W' } else { 'E' }
    )
}

/// Plotter-style multi-line dump.
pub fn dump(bits: &[bool]) -> String {
    let d = decode_beacon(bits, true);
    let mut s = String::new();
    if let Some(id) = hex_id(bits) {
        let _ = writeln!(s, "hex id:    {id}");
    }
    match &d.message {
        Some(m) => {
            let _ = writeln!(s, "mode:      {}", if m.self_test { "self-test" } else { "normal" });
            let _ = writeln!(s, "country:   {}", m.country_code);
            let scheme = match m.scheme {
                LocationScheme::User => "user",
                LocationScheme::Standard => "standard location",
            };
            let (proto, ident) = match m.identity {
                Identity::Mmsi { mmsi, beacon_number } => {
                    ("maritime (MMSI)", format!("MMSI {mmsi:09} beacon {beacon_number}"))
                }
                Identity::Icao24(a) => ("aviation (ELT, 24-bit address)", format!("ICAO24 {a:06X}")),
                Identity::Serial { serial, cert } => ("serial (PLB)", format!("serial {serial} cert {cert}")),
            };
            let _ = writeln!(s, "protocol:  {proto}, {scheme}");
            let _ = writeln!(s, "identity:  {ident}");
            let _ = writeln!(s, "position:  {}", m.position.map_or("not available".into(), fmt_pos));
            let _ = writeln!(s, "homing:    {}", if m.homing_121_5 { "121.5 MHz" } else { "none" });
        }
        None => {
            let _ = writeln!(s, "message:   undecodable");
        }
    }
    let _ = writeln!(s, "status:    {}", d.diagnosis);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(m: &BeaconMessage) -> BeaconMessage {
        let bits = encode_beacon(m).unwrap();
        assert_eq!(bits.len(), 144);
        let d = decode_beacon(&bits, false);
        assert!(d.diagnosis.is_empty(), "{}", d.diagnosis);
        d.message.unwrap()
    }

    #[test]
    fn all_zero_pdf1_has_zero_bch1() {
        let b = encode_raw(0, 0, false);
        assert_eq!(b.uint(BCH1, 21), 0);
        assert_eq!(b.uint(BCH2, 12), 0);
        assert_eq!(b.uint(0, 24), 0x7FFF << 9 | FRAME_SYNC_NORMAL);
    }

    #[test]
    fn maritime_country_from_mid() {
        let m = BeaconMessage::maritime(230_123_456, 1, Some((60.17, 24.94)));
        let bits = encode_beacon(&m).unwrap();
        // Independent slice: bits 27-36 are the country code.
        let cc = bits[26..36].iter().fold(0u16, |a, &b| a << 1 | b as u16);
        assert_eq!(cc, 230);
        let back = roundtrip(&m);
        assert_eq!(back.identity, m.identity);
        let (lat, lon) = back.position.unwrap();
        assert!((lat - 60.17).abs() <= 1.0 / 30.0 + 1e-9);
        assert!((lon - 24.94).abs() <= 1.0 / 30.0 + 1e-9);
    }

    #[test]
    fn elt_and_plb_roundtrip() {
        let elt = BeaconMessage::elt(366, 0xA1B2C3, Some((-33.9, 151.2)));
        assert_eq!(roundtrip(&elt).identity, Identity::Icao24(0xA1B2C3));
        let plb = BeaconMessage::plb(232, 54321, 107, None);
        let back = roundtrip(&plb);
        assert_eq!(back, plb);
    }

    #[test]
    fn standard_location_variants() {
        for id in [
            Identity::Mmsi { mmsi: 257_000_001, beacon_number: 12 },
            Identity::Icao24(0x4840D6),
            Identity::Serial { serial: 9999, cert: 1000 },
        ] {
            let m = BeaconMessage {
                scheme: LocationScheme::Standard,
                identity: id,
                country_code: 257,
                ..BeaconMessage::maritime(257_000_001, 0, Some((-12.3, -45.6)))
            };
            let back = roundtrip(&m);
            assert_eq!(back.identity, id);
            let (lat, lon) = back.position.unwrap();
            assert!((lat + 12.3).abs() <= 0.125 + 1e-9 && (lon + 45.6).abs() <= 0.125 + 1e-9);
        }
    }

    #[test]
    fn self_test_sync_distinguished() {
        let mut m = BeaconMessage::maritime(230_000_001, 0, None);
        m.self_test = true;
        let bits = encode_beacon(&m).unwrap();
        assert_eq!(bits.uint(15, 9), 0b011010000);
        assert!(roundtrip(&m).self_test);
        // normal and self-test patterns are bitwise complements in the last 8 bits
        assert_eq!((FRAME_SYNC_NORMAL ^ FRAME_SYNC_SELF_TEST) & 0xFF, 0xFF);
    }

    #[test]
    fn pdf1_flip_fails_bch1() {
        let m = BeaconMessage::maritime(230_123_456, 1, None);
        let mut bits = encode_beacon(&m).unwrap();
        bits[40] = !bits[40];
        let d = decode_beacon(&bits, false);
        assert!(d.diagnosis.has("bch1_failed"));
        assert!(d.message.is_none());
        assert!(decode_beacon(&bits, true).message.is_some());
    }

    #[test]
    fn validation() {
        assert!(matches!(encode_beacon(&BeaconMessage::elt(1, 1 << 24, None)), Err(EpirbError::IdentityOverflow(_))));
        assert_eq!(encode_beacon(&BeaconMessage::elt(1024, 1, None)), Err(EpirbError::CountryCode(1024)));
        let mut m = BeaconMessage::maritime(230_000_000, 0, None);
        m.country_code = 231;
        assert!(matches!(encode_beacon(&m), Err(EpirbError::MidMismatch { .. })));
        m.format = MessageFormat::Short;
        assert_eq!(encode_beacon(&m), Err(EpirbError::ShortFormat));
    }

    #[test]
    fn short_and_garbage_inputs() {
        assert!(decode_beacon(&[true; 112], true).diagnosis.has("short_format"));
        assert!(decode_beacon(&[false; 144], true).diagnosis.has("bad_bit_sync"));
        assert!(decode_beacon(&[true; 7], true).diagnosis.has("wrong_length"));
    }

    #[test]
    fn dump_mentions_identity() {
        let bits = encode_beacon(&BeaconMessage::elt(366, 0xA1B2C3, None)).unwrap();
        let s = dump(&bits);
        assert!(s.contains("A1B2C3") && s.contains("country:   366"), "{s}");
        assert_eq!(hex_id(&bits).unwrap().len(), 15);
    }
}
