//! AIS codec: message types 1, 14 and 18, AIVDM sentences, and the HDLC air
//! interface that feeds the GMSK modem.

pub mod air;
pub mod nmea;
pub mod sixbit;

use thiserror::Error;

use crate::bits::Bits;
use crate::diag::{Diagnosis, Issue};

pub use air::{AirFrameOptions, AisAirFrame, TrainingPattern};
pub use nmea::{AivdmSentence, Channel};

/// Positions are in 1/10000 arc-minute.
pub const POSITION_SCALE: f64 = 600_000.0;
pub const LAT_UNAVAILABLE: i32 = 91 * 600_000;
pub const LON_UNAVAILABLE: i32 = 181 * 600_000;
pub const SOG_UNAVAILABLE: u16 = 1023;
pub const COG_UNAVAILABLE: u16 = 3600;
pub const HEADING_UNAVAILABLE: u16 = 511;
pub const ROT_UNAVAILABLE: i8 = -128;
pub const TIMESTAMP_UNAVAILABLE: u8 = 60;
pub const POSITION_REPORT_BITS: usize = 168;
pub const MAX_SAFETY_TEXT: usize = 161;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AisError {
    #[error("mmsi {0} does not fit in 30 bits")]
    Mmsi(u32),
    #[error("latitude {0} outside [-90, 90]")]
    Latitude(f64),
    #[error("longitude {0} outside [-180, 180]")]
    Longitude(f64),
    #[error("speed {0} kt outside [0, 102.2]")]
    Speed(f64),
    #[error("course {0} outside [0, 360)")]
    Course(f64),
    #[error("heading {0} outside 0..=359")]
    Heading(u16),
    #[error("navigation status {0} outside 0..=15")]
    NavStatus(u8),
    #[error("character {0:?} is not in the 6-bit text alphabet")]
    TextChar(char),
    #[error("text has {0} characters, at most 161 allowed")]
    TextTooLong(usize),
    #[error("text must not end with '@' (it is the padding character)")]
    TrailingPad,
    #[error("latitude and longitude must both be given or both be absent")]
    PartialPosition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PositionReport {
    pub msg_type: u8,
    pub repeat: u8,
    pub mmsi: u32,
    pub nav_status: u8,
    pub rot: i8,
    /// Tenths of a knot.
    pub sog: u16,
    pub position_accuracy: bool,
    pub lon: i32,
    pub lat: i32,
    /// Tenths of a degree.
    pub cog: u16,
    pub heading: u16,
    pub timestamp: u8,
    pub maneuver: u8,
    pub raim: bool,
    pub radio: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyBroadcast {
    pub repeat: u8,
    pub mmsi: u32,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassBPosition {
    pub repeat: u8,
    pub mmsi: u32,
    pub sog: u16,
    pub position_accuracy: bool,
    pub lon: i32,
    pub lat: i32,
    pub cog: u16,
    pub heading: u16,
    pub timestamp: u8,
    pub cs_unit: bool,
    pub display: bool,
    pub dsc: bool,
    pub band: bool,
    pub msg22: bool,
    pub assigned: bool,
    pub raim: bool,
    pub radio: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AisMessage {
    Position(PositionReport),
    Safety(SafetyBroadcast),
    ClassB(ClassBPosition),
}

fn deg(v: i32, sentinel: i32) -> Option<f64> {
    (v != sentinel).then(|| v as f64 / POSITION_SCALE)
}

impl AisMessage {
    pub fn msg_type(&self) -> u8 {
        match self {
            AisMessage::Position(p) => p.msg_type,
            AisMessage::Safety(_) => 14,
            AisMessage::ClassB(_) => 18,
        }
    }

    pub fn mmsi(&self) -> u32 {
        match self {
            AisMessage::Position(p) => p.mmsi,
            AisMessage::Safety(s) => s.mmsi,
            AisMessage::ClassB(b) => b.mmsi,
        }
    }

    /// Latitude/longitude in degrees when both are available.
    pub fn position(&self) -> Option<(f64, f64)> {
        let (lat, lon) = match self {
            AisMessage::Position(p) => (p.lat, p.lon),
            AisMessage::ClassB(b) => (b.lat, b.lon),
            AisMessage::Safety(_) => return None,
        };
        Some((deg(lat, LAT_UNAVAILABLE)?, deg(lon, LON_UNAVAILABLE)?))
    }

    /// Speed (kt) and course (deg) when available.
    pub fn motion(&self) -> Option<(f64, f64)> {
        let (sog, cog) = match self {
            AisMessage::Position(p) => (p.sog, p.cog),
            AisMessage::ClassB(b) => (b.sog, b.cog),
            AisMessage::Safety(_) => return None,
        };
        if sog == SOG_UNAVAILABLE || cog >= COG_UNAVAILABLE {
            return None;
        }
        Some((sog as f64 / 10.0, cog as f64 / 10.0))
    }

    pub fn to_bits(&self) -> Bits {
        let mut b = Bits::with_capacity(POSITION_REPORT_BITS);
        match self {
            AisMessage::Position(p) => {
                b.push_uint(p.msg_type as u64, 6);
                b.push_uint(p.repeat as u64, 2);
                b.push_uint(p.mmsi as u64, 30);
                b.push_uint(p.nav_status as u64, 4);
                b.push_int(p.rot as i64, 8);
                b.push_uint(p.sog as u64, 10);
                b.push_uint(p.position_accuracy as u64, 1);
                b.push_int(p.lon as i64, 28);
                b.push_int(p.lat as i64, 27);
                b.push_uint(p.cog as u64, 12);
                b.push_uint(p.heading as u64, 9);
                b.push_uint(p.timestamp as u64, 6);
                b.push_uint(p.maneuver as u64, 2);
                b.push_uint(0, 3);
                b.push_uint(p.raim as u64, 1);
                b.push_uint(p.radio as u64, 19);
            }
            AisMessage::Safety(s) => {
                b.push_uint(14, 6);
                b.push_uint(s.repeat as u64, 2);
                b.push_uint(s.mmsi as u64, 30);
                b.push_uint(0, 2);
                for c in s.text.chars() {
                    b.push_uint(sixbit::text_code(c).unwrap_or(0) as u64, 6);
                }
            }
            AisMessage::ClassB(m) => {
                b.push_uint(18, 6);
                b.push_uint(m.repeat as u64, 2);
                b.push_uint(m.mmsi as u64, 30);
                b.push_uint(0, 8);
                b.push_uint(m.sog as u64, 10);
                b.push_uint(m.position_accuracy as u64, 1);
                b.push_int(m.lon as i64, 28);
                b.push_int(m.lat as i64, 27);
                b.push_uint(m.cog as u64, 12);
                b.push_uint(m.heading as u64, 9);
                b.push_uint(m.timestamp as u64, 6);
                b.push_uint(0, 2);
                for flag in [m.cs_unit, m.display, m.dsc, m.band, m.msg22, m.assigned, m.raim] {
                    b.push_uint(flag as u64, 1);
                }
                b.push_uint(m.radio as u64, 20);
            }
        }
        b
    }

    /// HDLC air frame (pre-NRZI) for this message.
    pub fn air_frame(&self, opts: &AirFrameOptions) -> AisAirFrame {
        air::build_air_frame(&self.to_bits(), opts)
    }
}

/// Inputs for the position encoders; `None` selects the "not available" value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VesselReport {
    pub mmsi: u32,
    pub lat: Option<f64>,
    pub lon: Option<f64>,
    pub sog_kt: Option<f64>,
    pub cog_deg: Option<f64>,
    pub heading: Option<u16>,
    pub nav_status: u8,
}

struct Quantized {
    lat: i32,
    lon: i32,
    sog: u16,
    cog: u16,
    heading: u16,
}

fn quantize(r: &VesselReport) -> Result<Quantized, AisError> {
    if r.mmsi >= 1 << 30 {
        return Err(AisError::Mmsi(r.mmsi));
    }
    if r.nav_status > 15 {
        return Err(AisError::NavStatus(r.nav_status));
    }
    let lat = match r.lat {
        None => LAT_UNAVAILABLE,
        Some(v) if (-90.0..=90.0).contains(&v) => (v * POSITION_SCALE).round() as i32,
        Some(v) => return Err(AisError::Latitude(v)),
    };
    let lon = match r.lon {
        None => LON_UNAVAILABLE,
        Some(v) if (-180.0..=180.0).contains(&v) => (v * POSITION_SCALE).round() as i32,
        Some(v) => return Err(AisError::Longitude(v)),
    };
    if r.lat.is_some() != r.lon.is_some() {
        return Err(AisError::PartialPosition);
    }
    let sog = match r.sog_kt {
        None => SOG_UNAVAILABLE,
        Some(v) if (0.0..=102.2).contains(&v) => (v * 10.0).round() as u16,
        Some(v) => return Err(AisError::Speed(v)),
    };
    let cog = match r.cog_deg {
        None => COG_UNAVAILABLE,
        Some(v) if (0.0..360.0).contains(&v) => ((v * 10.0).round() as u16) % 3600,
        Some(v) => return Err(AisError::Course(v)),
    };
    let heading = match r.heading {
        None => HEADING_UNAVAILABLE,
        Some(h) if h < 360 => h,
        Some(h) => return Err(AisError::Heading(h)),
    };
    Ok(Quantized { lat, lon, sog, cog, heading })
}

/// Class A position report (type 1).
pub fn encode_position_report(r: &VesselReport) -> Result<AisMessage, AisError> {
    let q = quantize(r)?;
    Ok(AisMessage::Position(PositionReport {
        msg_type: 1,
        repeat: 0,
        mmsi: r.mmsi,
        nav_status: r.nav_status,
        rot: ROT_UNAVAILABLE,
        sog: q.sog,
        position_accuracy: false,
        lon: q.lon,
        lat: q.lat,
        cog: q.cog,
        heading: q.heading,
        timestamp: TIMESTAMP_UNAVAILABLE,
        maneuver: 0,
        raim: false,
        radio: 0,
    }))
}

/// Class B position report (type 18).
pub fn encode_class_b(r: &VesselReport) -> Result<AisMessage, AisError> {
    let q = quantize(r)?;
    Ok(AisMessage::ClassB(ClassBPosition {
        repeat: 0,
        mmsi: r.mmsi,
        sog: q.sog,
        position_accuracy: false,
        lon: q.lon,
        lat: q.lat,
        cog: q.cog,
        heading: q.heading,
        timestamp: TIMESTAMP_UNAVAILABLE,
        cs_unit: true,
        display: false,
        dsc: false,
        band: true,
        msg22: false,
        assigned: false,
        raim: false,
        radio: 0,
    }))
}

/// Safety-related broadcast (type 14).
pub fn encode_safety_broadcast(mmsi: u32, text: &str) -> Result<AisMessage, AisError> {
    if mmsi >= 1 << 30 {
        return Err(AisError::Mmsi(mmsi));
    }
    let n = text.chars().count();
    if n > MAX_SAFETY_TEXT {
        return Err(AisError::TextTooLong(n));
    }
    if let Some(c) = text.chars().find(|&c| sixbit::text_code(c).is_none()) {
        return Err(AisError::TextChar(c));
    }
    if text.ends_with('@') {
        return Err(AisError::TrailingPad);
    }
    Ok(AisMessage::Safety(SafetyBroadcast { repeat: 0, mmsi, text: text.to_string() }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AisDecoded {
    pub message: Option<AisMessage>,
    pub diagnosis: Diagnosis,
}

fn check_position(lat: i32, lon: i32, diag: &mut Diagnosis) {
    let lat_ok = lat.abs() <= 90 * 600_000;
    let lon_ok = lon.abs() <= 180 * 600_000;
    if lat != LAT_UNAVAILABLE && !lat_ok {
        diag.field("lat");
    }
    if lon != LON_UNAVAILABLE && !lon_ok {
        diag.field("lon");
    }
    // One sentinel without the other is not a meaningful position.
    if (lat == LAT_UNAVAILABLE) != (lon == LON_UNAVAILABLE) {
        diag.field(if lat == LAT_UNAVAILABLE { "lat" } else { "lon" });
    }
}

fn check_motion(sog: u16, cog: u16, heading: u16, diag: &mut Diagnosis) {
    let _ = sog;
    if cog > COG_UNAVAILABLE {
        diag.field("cog");
    }
    if heading >= 360 && heading != HEADING_UNAVAILABLE {
        diag.field("heading");
    }
}

/// Decodes an application-layer payload. Total over all inputs.
pub fn decode_message(bits: &[bool]) -> AisDecoded {
    let mut diagnosis = Diagnosis::default();
    if bits.len() < 38 {
        diagnosis.push(Issue::WrongLength { expected: POSITION_REPORT_BITS, got: bits.len() });
        return AisDecoded { message: None, diagnosis };
    }
    let b = Bits::from_bools(bits.to_vec());
    let msg_type = b.uint(0, 6) as u8;
    let repeat = b.uint(6, 2) as u8;
    let mmsi = b.uint(8, 30) as u32;
    let message = match msg_type {
        1..=3 => {
            if bits.len() < POSITION_REPORT_BITS {
                diagnosis.push(Issue::WrongLength { expected: POSITION_REPORT_BITS, got: bits.len() });
            }
            let p = PositionReport {
                msg_type,
                repeat,
                mmsi,
                nav_status: b.uint(38, 4) as u8,
                rot: b.int(42, 8) as i8,
                sog: b.uint(50, 10) as u16,
                position_accuracy: b.uint(60, 1) == 1,
                lon: b.int(61, 28) as i32,
                lat: b.int(89, 27) as i32,
                cog: b.uint(116, 12) as u16,
                heading: b.uint(128, 9) as u16,
                timestamp: b.uint(137, 6) as u8,
                maneuver: b.uint(143, 2) as u8,
                raim: b.uint(148, 1) == 1,
                radio: b.uint(149, 19) as u32,
            };
            check_position(p.lat, p.lon, &mut diagnosis);
            check_motion(p.sog, p.cog, p.heading, &mut diagnosis);
            if p.timestamp > 63 {
                diagnosis.field("timestamp");
            }
            AisMessage::Position(p)
        }
        14 => {
            let n = bits.len().saturating_sub(40) / 6;
            let text: String = (0..n).map(|i| sixbit::text_char(b.uint(40 + 6 * i, 6) as u8)).collect();
            let text = text.trim_end_matches('@').to_string();
            if text.chars().count() > MAX_SAFETY_TEXT {
                diagnosis.field("text");
            }
            AisMessage::Safety(SafetyBroadcast { repeat, mmsi, text })
        }
        18 => {
            if bits.len() < POSITION_REPORT_BITS {
                diagnosis.push(Issue::WrongLength { expected: POSITION_REPORT_BITS, got: bits.len() });
            }
            let m = ClassBPosition {
                repeat,
                mmsi,
                sog: b.uint(46, 10) as u16,
                position_accuracy: b.uint(56, 1) == 1,
                lon: b.int(57, 28) as i32,
                lat: b.int(85, 27) as i32,
                cog: b.uint(112, 12) as u16,
                heading: b.uint(124, 9) as u16,
                timestamp: b.uint(133, 6) as u8,
                cs_unit: b.uint(141, 1) == 1,
                display: b.uint(142, 1) == 1,
                dsc: b.uint(143, 1) == 1,
                band: b.uint(144, 1) == 1,
                msg22: b.uint(145, 1) == 1,
                assigned: b.uint(146, 1) == 1,
                raim: b.uint(147, 1) == 1,
                radio: b.uint(148, 20) as u32,
            };
            check_position(m.lat, m.lon, &mut diagnosis);
            check_motion(m.sog, m.cog, m.heading, &mut diagnosis);
            AisMessage::ClassB(m)
        }
        other => {
            diagnosis.push(Issue::UnknownTypecode(other));
            return AisDecoded { message: None, diagnosis };
        }
    };
    AisDecoded { message: Some(message), diagnosis }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AirDecoded {
    pub training: Bits,
    pub message: Option<AisMessage>,
    pub diagnosis: Diagnosis,
}

/// Deframes a pre-NRZI air frame and decodes the message inside.
pub fn decode_air(bits: &[bool], lenient: bool) -> AirDecoded {
    let d = air::deframe(bits, lenient);
    let mut diagnosis = d.diagnosis;
    let message = d.data.and_then(|data| {
        let m = decode_message(&data);
        for issue in m.diagnosis.issues {
            // Byte padding on air can leave a short tail; not an error here.
            if !matches!(issue, Issue::WrongLength { .. }) || data.len() < POSITION_REPORT_BITS {
                diagnosis.push(issue);
            }
        }
        m.message
    });
    AirDecoded { training: d.training, message, diagnosis }
}

pub fn describe(message: &AisMessage) -> String {
    match message {
        AisMessage::Position(_) | AisMessage::ClassB(_) => {
            let pos = message
                .position()
                .map_or("position n/a".into(), |(lat, lon)| format!("lat={lat:.6} lon={lon:.6}"));
            let motion = message
                .motion()
                .map_or("motion n/a".into(), |(s, c)| format!("sog={s:.1}kt cog={c:.1}"));
            format!("type={} mmsi={} {pos} {motion}", message.msg_type(), message.mmsi())
        }
        AisMessage::Safety(s) => format!("type=14 mmsi={} text={:?}", s.mmsi, s.text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unavailable_report_starts_with_type_one() {
        let m = encode_position_report(&VesselReport::default()).unwrap();
        let bits = m.to_bits();
        assert_eq!(bits.len(), 168);
        assert_eq!(bits.uint(0, 6), 1);
        let AisMessage::Position(p) = &m else { panic!() };
        assert_eq!((p.lat, p.lon), (LAT_UNAVAILABLE, LON_UNAVAILABLE));
        assert_eq!(decode_message(&bits).message.unwrap(), m);
    }

    #[test]
    fn quantization_bound() {
        let r = VesselReport { mmsi: 230_000_001, lat: Some(60.0), lon: Some(25.0), ..Default::default() };
        let m = encode_position_report(&r).unwrap();
        let (lat, lon) = decode_message(&m.to_bits()).message.unwrap().position().unwrap();
        let lsb = 1.0 / POSITION_SCALE;
        assert!((lat - 60.0).abs() <= lsb && (lon - 25.0).abs() <= lsb);
    }

    #[test]
    fn validation_errors() {
        let r = VesselReport { lat: Some(91.5), ..Default::default() };
        assert_eq!(encode_position_report(&r), Err(AisError::Latitude(91.5)));
        let r = VesselReport { lat: Some(91.0), ..Default::default() };
        assert!(encode_position_report(&r).is_err());
        let r = VesselReport { heading: Some(360), ..Default::default() };
        assert_eq!(encode_position_report(&r), Err(AisError::Heading(360)));
        let r = VesselReport { mmsi: 1 << 30, ..Default::default() };
        assert!(encode_position_report(&r).is_err());
        let r = VesselReport { lat: Some(10.0), ..Default::default() };
        assert_eq!(encode_position_report(&r), Err(AisError::PartialPosition));
    }

    #[test]
    fn mob_text_roundtrip() {
        let m = encode_safety_broadcast(244_000_000, "MAN OVERBOARD").unwrap();
        let d = decode_message(&m.to_bits());
        assert!(d.diagnosis.is_empty());
        match d.message.unwrap() {
            AisMessage::Safety(s) => assert_eq!(s.text, "MAN OVERBOARD"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn safety_text_length_limits() {
        let empty = encode_safety_broadcast(1, "").unwrap();
        assert_eq!(empty.to_bits().len(), 40);
        let max: String = std::iter::repeat_n('A', 161).collect();
        let m = encode_safety_broadcast(1, &max).unwrap();
        // 40 header bits plus 6 bits per character.
        assert_eq!(m.to_bits().len(), 40 + 6 * 161);
        let over: String = std::iter::repeat_n('A', 162).collect();
        assert_eq!(encode_safety_broadcast(1, &over), Err(AisError::TextTooLong(162)));
        assert_eq!(encode_safety_broadcast(1, "mob"), Err(AisError::TextChar('m')));
    }

    #[test]
    fn class_b_roundtrip() {
        let r = VesselReport {
            mmsi: 338_000_111,
            lat: Some(-33.5),
            lon: Some(151.25),
            sog_kt: Some(12.3),
            cog_deg: Some(271.4),
            heading: Some(270),
            nav_status: 0,
        };
        let m = encode_class_b(&r).unwrap();
        assert_eq!(m.to_bits().len(), 168);
        let d = decode_message(&m.to_bits());
        assert!(d.diagnosis.is_empty());
        assert_eq!(d.message.unwrap(), m);
    }

    #[test]
    fn sentinel_misuse_flagged() {
        let mut m = encode_position_report(&VesselReport { lat: Some(10.0), lon: Some(10.0), ..Default::default() }).unwrap();
        if let AisMessage::Position(p) = &mut m {
            p.lat = LAT_UNAVAILABLE;
        }
        let d = decode_message(&m.to_bits());
        assert_eq!(d.diagnosis.fields_out_of_range(), vec!["lat"]);
    }

    #[test]
    fn air_layer_roundtrip_type14_padding() {
        let m = encode_safety_broadcast(1, "SOS").unwrap();
        let d = decode_air(&m.air_frame(&AirFrameOptions::default()).to_bits(), false);
        assert!(d.diagnosis.is_empty(), "{}", d.diagnosis);
        assert_eq!(d.message.unwrap(), m);
    }

    #[test]
    fn unknown_type() {
        let mut b = Bits::zeros(168);
        b.set_uint(0, 6, 27);
        assert!(decode_message(&b).diagnosis.has("unknown_typecode"));
        assert!(decode_message(&[true; 5]).diagnosis.has("wrong_length"));
    }
}
