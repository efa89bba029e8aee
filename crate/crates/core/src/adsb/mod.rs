//! ADS-B 1090ES (Mode S DF17 extended squitter) codec.
//!
//! Covers identification (TC 1-4), airborne position with barometric
//! altitude (TC 9-18), airborne velocity subtype 1 (TC 19) and aircraft
//! status / emergency (TC 28 subtype 1). Surface position is not implemented.

pub mod cpr;
pub mod crc;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::Bits;
use crate::diag::{Diagnosis, Issue};

pub use cpr::{CprError, CprFormat, CprPosition};
pub use crc::{crc24, crc24_bytes, frame_remainder};

pub const FRAME_BITS: usize = 112;
pub const DF_EXTENDED_SQUITTER: u8 = 17;
pub const DEFAULT_POSITION_TC: u8 = 11;
pub const MAX_ALTITUDE_FT: f64 = 50_175.0;
pub const MIN_ALTITUDE_FT: f64 = -1_000.0;
pub const MAX_VELOCITY_COMPONENT_KT: i32 = 1022;

/// 6-bit identification charset; `#` marks unassigned codes.
pub const CHARSET: &[u8; 64] =
    b"#ABCDEFGHIJKLMNOPQRSTUVWXYZ##### ###############0123456789######";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdsbError {
    #[error("expected {expected} bits, got {got}")]
    Length { expected: usize, got: usize },
    #[error("callsign has {0} characters, at most 8 allowed")]
    CallsignTooLong(usize),
    #[error("character {0:?} is not in the identification charset")]
    IllegalCallsignChar(char),
    #[error("icao address {0:#x} does not fit in 24 bits")]
    IcaoOutOfRange(u32),
    #[error("latitude {0} outside [-90, 90]")]
    LatitudeOutOfRange(f64),
    #[error("longitude {0} outside [-180, 180)")]
    LongitudeOutOfRange(f64),
    #[error("altitude {0} ft outside the encodable range")]
    AltitudeOutOfRange(f64),
    #[error("velocity component {0} kt exceeds the encodable maximum")]
    SpeedOutOfRange(f64),
    #[error("vertical rate {0} ft/min outside the encodable range")]
    VerticalRateOutOfRange(f64),
    #[error("track {0} outside [0, 360)")]
    TrackOutOfRange(f64),
    #[error("type code {0} not valid for this message")]
    BadTypeCode(u8),
    #[error("emergency state is reserved")]
    ReservedEmergency,
    #[error("squawk {0:o} is not a four-digit octal code")]
    BadSquawk(u16),
    #[error(transparent)]
    Cpr(#[from] CprError),
}

/// A 112-bit Mode S frame.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeSFrame {
    pub raw: [u8; 14],
}

impl ModeSFrame {
    /// Builds a frame with freshly computed parity.
    pub fn new(df: u8, ca: u8, icao24: u32, me: u64) -> Self {
        let mut raw = [0u8; 14];
        raw[0] = ((df & 0x1F) << 3) | (ca & 0x7);
        raw[1..4].copy_from_slice(&icao24.to_be_bytes()[1..]);
        raw[4..11].copy_from_slice(&me.to_be_bytes()[1..]);
        let mut f = ModeSFrame { raw };
        f.set_parity(crc24_bytes(&f.raw[..11]));
        f
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self, AdsbError> {
        if bits.len() != FRAME_BITS {
            return Err(AdsbError::Length { expected: FRAME_BITS, got: bits.len() });
        }
        let bytes = Bits::from_bools(bits.to_vec()).to_bytes();
        let mut raw = [0u8; 14];
        raw.copy_from_slice(&bytes);
        Ok(ModeSFrame { raw })
    }

    pub fn from_hex(s: &str) -> Result<Self, AdsbError> {
        let bits = Bits::from_hex(s.trim(), None)
            .map_err(|_| AdsbError::Length { expected: FRAME_BITS, got: 0 })?;
        Self::from_bits(&bits)
    }

    pub fn to_bits(&self) -> Bits {
        Bits::from_bytes(&self.raw)
    }

    pub fn to_hex(&self) -> String {
        self.raw.iter().map(|b| format!("{b:02X}")).collect()
    }

    pub fn df(&self) -> u8 {
        self.raw[0] >> 3
    }

    pub fn ca(&self) -> u8 {
        self.raw[0] & 0x7
    }

    pub fn icao24(&self) -> u32 {
        u32::from_be_bytes([0, self.raw[1], self.raw[2], self.raw[3]])
    }

    pub fn me(&self) -> u64 {
        let mut b = [0u8; 8];
        b[1..].copy_from_slice(&self.raw[4..11]);
        u64::from_be_bytes(b)
    }

    pub fn type_code(&self) -> u8 {
        self.raw[4] >> 3
    }

    pub fn parity(&self) -> u32 {
        u32::from_be_bytes([0, self.raw[11], self.raw[12], self.raw[13]])
    }

    pub fn set_parity(&mut self, parity: u32) {
        self.raw[11..14].copy_from_slice(&parity.to_be_bytes()[1..]);
    }

    /// Recomputes parity over the current first 88 bits.
    pub fn fix_parity(&mut self) {
        self.set_parity(crc24_bytes(&self.raw[..11]));
    }

    pub fn crc_ok(&self) -> bool {
        frame_remainder(&self.raw) == 0
    }
}

impl fmt::Debug for ModeSFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModeSFrame({})", self.to_hex())
    }
}

/// Position, motion and identity of a (possibly spoofed) aircraft or vessel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinematicState {
    pub latitude: f64,
    pub longitude: f64,
    #[serde(default)]
    pub altitude_ft: f64,
    #[serde(default)]
    pub ground_speed_kt: f64,
    #[serde(default)]
    pub track_deg: f64,
    #[serde(default)]
    pub callsign: String,
    #[serde(default)]
    pub squawk_emergency: bool,
}

impl Default for KinematicState {
    fn default() -> Self {
        KinematicState {
            latitude: 0.0,
            longitude: 0.0,
            altitude_ft: 0.0,
            ground_speed_kt: 0.0,
            track_deg: 0.0,
            callsign: String::new(),
            squawk_emergency: false,
        }
    }
}

impl KinematicState {
    pub fn validate(&self) -> Result<(), AdsbError> {
        if !(-90.0..=90.0).contains(&self.latitude) {
            return Err(AdsbError::LatitudeOutOfRange(self.latitude));
        }
        if !(-180.0..180.0).contains(&self.longitude) {
            return Err(AdsbError::LongitudeOutOfRange(self.longitude));
        }
        if !(0.0..360.0).contains(&self.track_deg) {
            return Err(AdsbError::TrackOutOfRange(self.track_deg));
        }
        if self.callsign.chars().count() > 8 {
            return Err(AdsbError::CallsignTooLong(self.callsign.chars().count()));
        }
        for c in self.callsign.chars() {
            char_code(c)?;
        }
        Ok(())
    }
}

fn char_code(c: char) -> Result<u8, AdsbError> {
    match c {
        'A'..='Z' => Ok(c as u8 - b'A' + 1),
        '0'..='9' => Ok(c as u8 - b'0' + 48),
        ' ' => Ok(32),
        _ => Err(AdsbError::IllegalCallsignChar(c)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identification {
    pub type_code: u8,
    pub category: u8,
    /// Callsign with trailing padding removed.
    pub callsign: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AirbornePosition {
    pub type_code: u8,
    pub surveillance_status: u8,
    pub single_antenna: bool,
    /// `None` when the altitude field is zero (not available).
    pub altitude_ft: Option<i32>,
    pub time_sync: bool,
    pub cpr: CprPosition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Velocity {
    pub intent_change: bool,
    pub ifr_capable: bool,
    pub nac_v: u8,
    /// East-west component in knots, positive east.
    pub east_kt: Option<i16>,
    /// North-south component in knots, positive north.
    pub north_kt: Option<i16>,
    pub vertical_rate_baro: bool,
    /// Multiple of 64 ft/min, positive up.
    pub vertical_rate_fpm: Option<i32>,
    /// GNSS minus barometric altitude, multiple of 25 ft.
    pub gnss_baro_diff_ft: Option<i32>,
}

impl Velocity {
    pub fn ground_speed_kt(&self) -> Option<f64> {
        Some((self.east_kt? as f64).hypot(self.north_kt? as f64))
    }

    pub fn track_deg(&self) -> Option<f64> {
        let t = (self.east_kt? as f64).atan2(self.north_kt? as f64).to_degrees();
        Some(if t < 0.0 { t + 360.0 } else { t })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmergencyState {
    None,
    General,
    Medical,
    MinimumFuel,
    NoCommunications,
    UnlawfulInterference,
    DownedAircraft,
    Reserved,
}

impl EmergencyState {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Self {
        use EmergencyState::*;
        [None, General, Medical, MinimumFuel, NoCommunications, UnlawfulInterference, DownedAircraft, Reserved]
            [(code & 7) as usize]
    }

    /// Squawk conventionally paired with the emergency.
    pub fn default_squawk(self) -> u16 {
        match self {
            EmergencyState::General | EmergencyState::Medical | EmergencyState::MinimumFuel
            | EmergencyState::DownedAircraft => 0o7700,
            EmergencyState::NoCommunications => 0o7600,
            EmergencyState::UnlawfulInterference => 0o7500,
            _ => 0o2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmergencyStatus {
    pub emergency: EmergencyState,
    /// Mode A code as four octal digits, e.g. `0o7700`.
    pub squawk: u16,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdsbMessage {
    Identification(Identification),
    AirbornePosition(AirbornePosition),
    Velocity(Velocity),
    EmergencyStatus(EmergencyStatus),
    /// Type code this decoder does not interpret; ME kept verbatim.
    Unknown { type_code: u8, me: u64 },
}

// ---------------------------------------------------------------------------
// Field encoders

fn encode_callsign(callsign: &str) -> Result<u64, AdsbError> {
    let n = callsign.chars().count();
    if n > 8 {
        return Err(AdsbError::CallsignTooLong(n));
    }
    let mut v = 0u64;
    for c in callsign.chars().chain(std::iter::repeat(' ')).take(8) {
        v = (v << 6) | char_code(c)? as u64;
    }
    Ok(v)
}

fn decode_callsign(v: u64, diag: &mut Diagnosis) -> String {
    let mut s = String::with_capacity(8);
    for i in (0..8).rev() {
        let code = ((v >> (i * 6)) & 0x3F) as usize;
        let c = CHARSET[code];
        if c == b'#' {
            diag.field("callsign");
        }
        s.push(c as char);
    }
    s.trim_end_matches(' ').to_string()
}

/// 12-bit altitude field with Q = 1 (25 ft steps, -1000 ft offset).
pub fn encode_altitude(alt_ft: f64) -> Result<u16, AdsbError> {
    if !(MIN_ALTITUDE_FT..=MAX_ALTITUDE_FT).contains(&alt_ft) {
        return Err(AdsbError::AltitudeOutOfRange(alt_ft));
    }
    let n = ((alt_ft + 1000.0) / 25.0).round() as u16;
    Ok(((n >> 4) << 5) | 0x10 | (n & 0xF))
}

fn decode_altitude(field: u16, diag: &mut Diagnosis) -> Option<i32> {
    if field == 0 {
        return None;
    }
    if field & 0x10 == 0 {
        // Gillham-coded 100 ft altitude is not produced by this encoder.
        diag.field("altitude_gillham");
        return None;
    }
    let n = ((field >> 5) << 4) | (field & 0xF);
    Some(n as i32 * 25 - 1000)
}

fn encode_mode_a(squawk: u16) -> Result<u16, AdsbError> {
    if squawk > 0o7777 {
        return Err(AdsbError::BadSquawk(squawk));
    }
    let a = (squawk >> 9) & 7;
    let b = (squawk >> 6) & 7;
    let c = (squawk >> 3) & 7;
    let d = squawk & 7;
    let bit = |digit: u16, w: u16| (digit >> w) & 1;
    // C1 A1 C2 A2 C4 A4 X B1 D1 B2 D2 B4 D4
    let order = [
        bit(c, 0), bit(a, 0), bit(c, 1), bit(a, 1), bit(c, 2), bit(a, 2), 0,
        bit(b, 0), bit(d, 0), bit(b, 1), bit(d, 1), bit(b, 2), bit(d, 2),
    ];
    Ok(order.iter().fold(0u16, |acc, &b| (acc << 1) | b))
}

fn decode_mode_a(code: u16) -> u16 {
    let bit = |i: u16| (code >> (12 - i)) & 1;
    let a = bit(1) | (bit(3) << 1) | (bit(5) << 2);
    let b = bit(7) | (bit(9) << 1) | (bit(11) << 2);
    let c = bit(0) | (bit(2) << 1) | (bit(4) << 2);
    let d = bit(8) | (bit(10) << 1) | (bit(12) << 2);
    (a << 9) | (b << 6) | (c << 3) | d
}

fn signed_magnitude(v: Option<i32>, step: i32, max_field: u32) -> Result<(u64, u64), i32> {
    match v {
        None => Ok((0, 0)),
        Some(x) => {
            let field = (x.unsigned_abs() / step as u32) + 1;
            if field > max_field {
                return Err(x);
            }
            Ok(((x < 0) as u64, field as u64))
        }
    }
}

// ---------------------------------------------------------------------------
// Message encoders

pub fn encode_message(icao24: u32, msg: &AdsbMessage) -> Result<ModeSFrame, AdsbError> {
    if icao24 > 0xFF_FFFF {
        return Err(AdsbError::IcaoOutOfRange(icao24));
    }
    let me = match msg {
        AdsbMessage::Identification(id) => {
            if !(1..=4).contains(&id.type_code) {
                return Err(AdsbError::BadTypeCode(id.type_code));
            }
            ((id.type_code as u64) << 51) | (((id.category & 7) as u64) << 48) | encode_callsign(&id.callsign)?
        }
        AdsbMessage::AirbornePosition(p) => {
            if !(9..=18).contains(&p.type_code) {
                return Err(AdsbError::BadTypeCode(p.type_code));
            }
            let alt = match p.altitude_ft {
                Some(a) => encode_altitude(a as f64)? as u64,
                None => 0,
            };
            ((p.type_code as u64) << 51)
                | (((p.surveillance_status & 3) as u64) << 49)
                | ((p.single_antenna as u64) << 48)
                | (alt << 36)
                | ((p.time_sync as u64) << 35)
                | ((p.cpr.format.is_odd() as u64) << 34)
                | (((p.cpr.lat_cpr & 0x1FFFF) as u64) << 17)
                | (p.cpr.lon_cpr & 0x1FFFF) as u64
        }
        AdsbMessage::Velocity(v) => {
            let max = MAX_VELOCITY_COMPONENT_KT as u32 + 1;
            let (ew_s, ew) = signed_magnitude(v.east_kt.map(i32::from), 1, max)
                .map_err(|x| AdsbError::SpeedOutOfRange(x as f64))?;
            let (ns_s, ns) = signed_magnitude(v.north_kt.map(i32::from), 1, max)
                .map_err(|x| AdsbError::SpeedOutOfRange(x as f64))?;
            let (vr_s, vr) = signed_magnitude(v.vertical_rate_fpm, 64, 511)
                .map_err(|x| AdsbError::VerticalRateOutOfRange(x as f64))?;
            let (df_s, dfv) = signed_magnitude(v.gnss_baro_diff_ft, 25, 127)
                .map_err(|x| AdsbError::AltitudeOutOfRange(x as f64))?;
            (19u64 << 51)
                | (1u64 << 48)
                | ((v.intent_change as u64) << 47)
                | ((v.ifr_capable as u64) << 46)
                | (((v.nac_v & 7) as u64) << 43)
                | (ew_s << 42)
                | (ew << 32)
                | (ns_s << 31)
                | (ns << 21)
                | ((v.vertical_rate_baro as u64) << 20)
                | (vr_s << 19)
                | (vr << 10)
                | (df_s << 7)
                | dfv
        }
        AdsbMessage::EmergencyStatus(e) => {
            if e.emergency == EmergencyState::Reserved {
                return Err(AdsbError::ReservedEmergency);
            }
            (28u64 << 51) | (1u64 << 48) | ((e.emergency.code() as u64) << 45)
                | ((encode_mode_a(e.squawk)? as u64) << 32)
        }
        AdsbMessage::Unknown { type_code, me } => {
            ((*type_code as u64 & 0x1F) << 51) | (me & ((1u64 << 51) - 1))
        }
    };
    Ok(ModeSFrame::new(DF_EXTENDED_SQUITTER, 5, icao24, me))
}

pub fn encode_identification(icao24: u32, callsign: &str) -> Result<ModeSFrame, AdsbError> {
    encode_message(
        icao24,
        &AdsbMessage::Identification(Identification {
            type_code: 4,
            category: 0,
            callsign: callsign.trim_end_matches(' ').to_string(),
        }),
    )
}

/// Position message for `state`; the caller alternates `format` between
/// consecutive frames.
pub fn encode_airborne_position(
    icao24: u32,
    state: &KinematicState,
    format: CprFormat,
) -> Result<ModeSFrame, AdsbError> {
    state.validate()?;
    let cpr = cpr::encode(state.latitude, state.longitude, format)?;
    let alt = encode_altitude(state.altitude_ft)?;
    let n = ((alt >> 5) << 4) | (alt & 0xF);
    encode_message(
        icao24,
        &AdsbMessage::AirbornePosition(AirbornePosition {
            type_code: DEFAULT_POSITION_TC,
            surveillance_status: if state.squawk_emergency { 1 } else { 0 },
            single_antenna: false,
            altitude_ft: Some(n as i32 * 25 - 1000),
            time_sync: false,
            cpr,
        }),
    )
}

pub fn encode_velocity(icao24: u32, state: &KinematicState) -> Result<ModeSFrame, AdsbError> {
    state.validate()?;
    let t = state.track_deg.to_radians();
    let east = (state.ground_speed_kt * t.sin()).round();
    let north = (state.ground_speed_kt * t.cos()).round();
    for c in [east, north] {
        if c.abs() > MAX_VELOCITY_COMPONENT_KT as f64 {
            return Err(AdsbError::SpeedOutOfRange(state.ground_speed_kt));
        }
    }
    encode_message(
        icao24,
        &AdsbMessage::Velocity(Velocity {
            intent_change: false,
            ifr_capable: false,
            nac_v: 1,
            east_kt: Some(east as i16),
            north_kt: Some(north as i16),
            vertical_rate_baro: true,
            vertical_rate_fpm: Some(0),
            gnss_baro_diff_ft: None,
        }),
    )
}

pub fn encode_emergency(icao24: u32, emergency: EmergencyState) -> Result<ModeSFrame, AdsbError> {
    encode_message(
        icao24,
        &AdsbMessage::EmergencyStatus(EmergencyStatus { emergency, squawk: emergency.default_squawk() }),
    )
}

// ---------------------------------------------------------------------------
// Decoder

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedFrame {
    pub df: u8,
    pub ca: u8,
    pub icao24: u32,
    /// `None` when strict decoding rejected the frame or the format is not DF17.
    pub message: Option<AdsbMessage>,
    pub diagnosis: Diagnosis,
}

impl DecodedFrame {
    pub fn is_clean(&self) -> bool {
        self.message.is_some() && self.diagnosis.is_empty()
    }
}

/// Decodes a 112-bit frame. Total over all inputs: malformed frames produce
/// a diagnosis, never a panic. In strict mode a CRC failure suppresses the
/// message.
pub fn decode_frame(raw: &[bool], strict: bool) -> DecodedFrame {
    let frame = match ModeSFrame::from_bits(raw) {
        Ok(f) => f,
        Err(_) => {
            let mut diagnosis = Diagnosis::default();
            diagnosis.push(Issue::WrongLength { expected: FRAME_BITS, got: raw.len() });
            return DecodedFrame { df: 0, ca: 0, icao24: 0, message: None, diagnosis };
        }
    };
    decode_mode_s(&frame, strict)
}

pub fn decode_mode_s(frame: &ModeSFrame, strict: bool) -> DecodedFrame {
    let mut diagnosis = Diagnosis::default();
    let mut out = DecodedFrame {
        df: frame.df(),
        ca: frame.ca(),
        icao24: frame.icao24(),
        message: None,
        diagnosis: Diagnosis::default(),
    };
    if !frame.crc_ok() {
        diagnosis.push(Issue::CrcFailed);
        if strict {
            out.diagnosis = diagnosis;
            return out;
        }
    }
    if out.df != DF_EXTENDED_SQUITTER {
        diagnosis.push(Issue::UnsupportedFormat(out.df));
        out.diagnosis = diagnosis;
        return out;
    }
    out.message = Some(decode_me(frame.me(), &mut diagnosis));
    out.diagnosis = diagnosis;
    out
}

fn decode_me(me: u64, diag: &mut Diagnosis) -> AdsbMessage {
    let field = |shift: u32, width: u32| (me >> shift) & ((1u64 << width) - 1);
    let tc = field(51, 5) as u8;
    match tc {
        1..=4 => AdsbMessage::Identification(Identification {
            type_code: tc,
            category: field(48, 3) as u8,
            callsign: decode_callsign(field(0, 48), diag),
        }),
        9..=18 => AdsbMessage::AirbornePosition(AirbornePosition {
            type_code: tc,
            surveillance_status: field(49, 2) as u8,
            single_antenna: field(48, 1) == 1,
            altitude_ft: decode_altitude(field(36, 12) as u16, diag),
            time_sync: field(35, 1) == 1,
            cpr: CprPosition {
                lat_cpr: field(17, 17) as u32,
                lon_cpr: field(0, 17) as u32,
                format: CprFormat::from_flag(field(34, 1) == 1),
            },
        }),
        19 => {
            let subtype = field(48, 3);
            if subtype != 1 {
                diag.field("velocity_subtype");
                return AdsbMessage::Unknown { type_code: tc, me };
            }
            let sm = |sign: u64, mag: u64, step: i32| -> Option<i32> {
                if mag == 0 {
                    None
                } else {
                    let v = (mag as i32 - 1) * step;
                    Some(if sign == 1 { -v } else { v })
                }
            };
            let east = sm(field(42, 1), field(32, 10), 1);
            let north = sm(field(31, 1), field(21, 10), 1);
            if field(32, 10) == 1023 {
                diag.field("east_velocity");
            }
            if field(21, 10) == 1023 {
                diag.field("north_velocity");
            }
            AdsbMessage::Velocity(Velocity {
                intent_change: field(47, 1) == 1,
                ifr_capable: field(46, 1) == 1,
                nac_v: field(43, 3) as u8,
                east_kt: east.map(|v| v as i16),
                north_kt: north.map(|v| v as i16),
                vertical_rate_baro: field(20, 1) == 1,
                vertical_rate_fpm: sm(field(19, 1), field(10, 9), 64),
                gnss_baro_diff_ft: sm(field(7, 1), field(0, 7), 25),
            })
        }
        28 => {
            if field(48, 3) != 1 {
                diag.field("status_subtype");
                return AdsbMessage::Unknown { type_code: tc, me };
            }
            let emergency = EmergencyState::from_code(field(45, 3) as u8);
            if emergency == EmergencyState::Reserved {
                diag.field("emergency_state");
            }
            let mode_a = field(32, 13) as u16;
            if mode_a & 0x40 != 0 {
                diag.field("squawk");
            }
            AdsbMessage::EmergencyStatus(EmergencyStatus { emergency, squawk: decode_mode_a(mode_a) })
        }
        _ => {
            diag.push(Issue::UnknownTypecode(tc));
            AdsbMessage::Unknown { type_code: tc, me }
        }
    }
}

/// One-line human-readable rendering of a decoded frame.
pub fn describe(d: &DecodedFrame) -> String {
    let body = match &d.message {
        None => "no message".to_string(),
        Some(AdsbMessage::Identification(id)) => {
            format!("identification tc={} cat={} callsign={}", id.type_code, id.category, id.callsign)
        }
        Some(AdsbMessage::AirbornePosition(p)) => format!(
            "position tc={} alt={} {} lat_cpr={} lon_cpr={}",
            p.type_code,
            p.altitude_ft.map_or("n/a".to_string(), |a| format!("{a}ft")),
            if p.cpr.format.is_odd() { "odd" } else { "even" },
            p.cpr.lat_cpr,
            p.cpr.lon_cpr
        ),
        Some(AdsbMessage::Velocity(v)) => format!(
            "velocity gs={} track={} vr={}",
            v.ground_speed_kt().map_or("n/a".into(), |s| format!("{s:.1}kt")),
            v.track_deg().map_or("n/a".into(), |t| format!("{t:.1}")),
            v.vertical_rate_fpm.map_or("n/a".into(), |r| format!("{r}fpm")),
        ),
        Some(AdsbMessage::EmergencyStatus(e)) => {
            format!("emergency state={:?} squawk={:04o}", e.emergency, e.squawk)
        }
        Some(AdsbMessage::Unknown { type_code, me }) => format!("unknown tc={type_code} me={me:014X}"),
    };
    format!("icao={:06X} df={} {} [{}]", d.icao24, d.df, body, d.diagnosis)
}
