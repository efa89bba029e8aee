//! GDL-90 datalink: flag/escape framing with CRC-16, heartbeat, ownship and
//! traffic reports, plus a byte-stream transport.

pub mod transport;

use thiserror::Error;

use crate::adsb::KinematicState;
use crate::diag::{Diagnosis, Issue};

pub use transport::{write_frames, FrameReader};

pub const FLAG: u8 = 0x7E;
pub const ESCAPE: u8 = 0x7D;
pub const ID_HEARTBEAT: u8 = 0;
pub const ID_OWNSHIP: u8 = 10;
pub const ID_TRAFFIC: u8 = 20;
/// Traffic/ownship report length including the message ID.
pub const REPORT_BYTES: usize = 28;
pub const HEARTBEAT_BYTES: usize = 7;
pub const ALTITUDE_INVALID: u16 = 0xFFF;
pub const HVEL_INVALID: u16 = 0xFFF;
pub const VVEL_INVALID: i16 = -2048; // 0x800
const SEMICIRCLE: f64 = (1 << 23) as f64 / 180.0;

const fn make_table() -> [u16; 256] {
    let mut table = [0u16; 256];
    let mut i = 0;
    while i < 256 {
        let mut crc = (i as u16) << 8;
        let mut bit = 0;
        while bit < 8 {
            crc = (crc << 1) ^ if crc & 0x8000 != 0 { 0x1021 } else { 0 };
            bit += 1;
        }
        table[i] = crc;
        i += 1;
    }
    table
}

pub static CRC_TABLE: [u16; 256] = make_table();

pub fn crc16(data: &[u8]) -> u16 {
    data.iter()
        .fold(0u16, |crc, &b| CRC_TABLE[(crc >> 8) as usize] ^ (crc << 8) ^ b as u16)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Gdl90Error {
    #[error("altitude {0} ft outside -1000..=101350")]
    Altitude(f64),
    #[error("latitude {0} outside [-90, 90]")]
    Latitude(f64),
    #[error("longitude {0} outside [-180, 180]")]
    Longitude(f64),
    #[error("participant address {0:#x} exceeds 24 bits")]
    Address(u32),
    #[error("callsign {0:?} is not up to 8 printable ASCII characters")]
    Callsign(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gdl90Message {
    pub id: u8,
    pub payload: Vec<u8>,
}

impl Gdl90Message {
    /// ID followed by payload, the span covered by the CRC.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = Vec::with_capacity(1 + self.payload.len());
        v.push(self.id);
        v.extend_from_slice(&self.payload);
        v
    }

    pub fn from_bytes(bytes: &[u8]) -> Option<Self> {
        let (&id, payload) = bytes.split_first()?;
        Some(Gdl90Message { id, payload: payload.to_vec() })
    }
}

fn escape_into(out: &mut Vec<u8>, b: u8) {
    if b == FLAG || b == ESCAPE {
        out.push(ESCAPE);
        out.push(b ^ 0x20);
    } else {
        out.push(b);
    }
}

/// Frames already-serialized message bytes (ID + payload).
pub fn frame_bytes(body: &[u8]) -> Vec<u8> {
    let crc = crc16(body);
    let mut out = Vec::with_capacity(body.len() + 6);
    out.push(FLAG);
    for &b in body.iter().chain(&crc.to_le_bytes()) {
        escape_into(&mut out, b);
    }
    out.push(FLAG);
    out
}

pub fn frame(message: &Gdl90Message) -> Vec<u8> {
    frame_bytes(&message.to_bytes())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deframed {
    pub message: Option<Gdl90Message>,
    pub diagnosis: Diagnosis,
}

/// Inverts `frame`. Total over arbitrary bytes.
pub fn deframe(bytes: &[u8], lenient: bool) -> Deframed {
    let mut diagnosis = Diagnosis::default();
    let inner = match bytes.first() {
        Some(&FLAG) => &bytes[1..],
        _ => {
            diagnosis.push(Issue::NoStartFlag);
            bytes
        }
    };
    let inner = match inner.iter().position(|&b| b == FLAG) {
        Some(end) => {
            if end + 1 != inner.len() {
                // trailing bytes after the closing flag
                diagnosis.push(Issue::WrongLength { expected: end + 2, got: bytes.len() });
            }
            &inner[..end]
        }
        None => {
            diagnosis.push(Issue::Unterminated);
            inner
        }
    };
    let mut body = Vec::with_capacity(inner.len());
    let mut it = inner.iter();
    while let Some(&b) = it.next() {
        if b != ESCAPE {
            body.push(b);
            continue;
        }
        match it.next() {
            Some(&n) if n == 0x5E || n == 0x5D => body.push(n ^ 0x20),
            Some(&n) => {
                diagnosis.push(Issue::BadEscape);
                body.push(n ^ 0x20);
            }
            None => diagnosis.push(Issue::BadEscape),
        }
    }
    if body.len() < 3 {
        diagnosis.push(Issue::TooShort);
        return Deframed { message: None, diagnosis };
    }
    let (msg, crc) = body.split_at(body.len() - 2);
    if crc16(msg) != u16::from_le_bytes([crc[0], crc[1]]) {
        diagnosis.push(Issue::CrcFailed);
    }
    let message = if !lenient && diagnosis.integrity_failed() {
        None
    } else {
        Gdl90Message::from_bytes(msg)
    };
    Deframed { message, diagnosis }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Heartbeat {
    pub status1: u8,
    pub status2: u8,
    /// Seconds since 0000Z, 17 bits.
    pub timestamp: u32,
    pub uplink_count: u8,
    pub basic_long_count: u16,
}

impl Heartbeat {
    pub const GPS_VALID: u8 = 0x80;
    pub const UAT_INITIALIZED: u8 = 0x01;
    pub const UTC_OK: u8 = 0x01;

    pub fn to_message(&self) -> Gdl90Message {
        let ts = self.timestamp & 0x1_FFFF;
        let status2 = (self.status2 & 0x7F) | (((ts >> 16) as u8) << 7);
        let counts = ((self.uplink_count as u16 & 0x1F) << 11) | (self.basic_long_count & 0x3FF);
        let [c0, c1] = counts.to_be_bytes();
        let [t0, t1] = (ts as u16).to_le_bytes();
        Gdl90Message { id: ID_HEARTBEAT, payload: vec![self.status1, status2, t0, t1, c0, c1] }
    }

    pub fn from_message(m: &Gdl90Message) -> Option<Self> {
        if m.id != ID_HEARTBEAT || m.payload.len() != HEARTBEAT_BYTES - 1 {
            return None;
        }
        let p = &m.payload;
        let counts = u16::from_be_bytes([p[4], p[5]]);
        Some(Heartbeat {
            status1: p[0],
            status2: p[1] & 0x7F,
            timestamp: ((p[1] as u32 >> 7) << 16) | u16::from_le_bytes([p[2], p[3]]) as u32,
            uplink_count: (counts >> 11) as u8,
            basic_long_count: counts & 0x3FF,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficReport {
    pub alert: bool,
    pub address_type: u8,
    pub address: u32,
    pub latitude: f64,
    pub longitude: f64,
    pub altitude_ft: Option<f64>,
    /// Airborne flag, report type and track type nibble.
    pub misc: u8,
    pub nic: u8,
    pub nacp: u8,
    pub horizontal_velocity_kt: Option<u16>,
    /// Feet per minute, 64 fpm resolution.
    pub vertical_velocity_fpm: Option<i32>,
    pub track_deg: f64,
    pub emitter_category: u8,
    pub callsign: String,
    pub emergency: u8,
}

impl TrafficReport {
    pub fn from_state(address: u32, state: &KinematicState) -> Self {
        TrafficReport {
            alert: false,
            address_type: 0,
            address,
            latitude: state.latitude,
            longitude: state.longitude,
            altitude_ft: Some(state.altitude_ft),
            misc: 0b1001,
            nic: 8,
            nacp: 9,
            horizontal_velocity_kt: Some(state.ground_speed_kt.round().clamp(0.0, 4094.0) as u16),
            vertical_velocity_fpm: Some(0),
            track_deg: state.track_deg,
            emitter_category: 1,
            callsign: state.callsign.trim().to_string(),
            emergency: 0,
        }
    }
}

/// Latitude/longitude to 24-bit semicircles, floor-rounded.
pub fn to_semicircles(deg: f64) -> i32 {
    let v = (deg * SEMICIRCLE).floor() as i64;
    // +180 wraps to -180 in 24-bit two's complement.
    (((v + (1 << 23)) & 0xFF_FFFF) - (1 << 23)) as i32
}

pub fn from_semicircles(v: i32) -> f64 {
    v as f64 / SEMICIRCLE
}

pub fn encode_altitude(alt_ft: f64) -> Result<u16, Gdl90Error> {
    let n = ((alt_ft + 1000.0) / 25.0).round();
    if !(0.0..ALTITUDE_INVALID as f64).contains(&n) {
        return Err(Gdl90Error::Altitude(alt_ft));
    }
    Ok(n as u16)
}

pub fn encode_report(id: u8, r: &TrafficReport) -> Result<Gdl90Message, Gdl90Error> {
    if !(-90.0..=90.0).contains(&r.latitude) {
        return Err(Gdl90Error::Latitude(r.latitude));
    }
    if !(-180.0..=180.0).contains(&r.longitude) {
        return Err(Gdl90Error::Longitude(r.longitude));
    }
    if r.address >= 1 << 24 {
        return Err(Gdl90Error::Address(r.address));
    }
    if r.callsign.len() > 8 || !r.callsign.bytes().all(|b| b.is_ascii_graphic() || b == b' ') {
        return Err(Gdl90Error::Callsign(r.callsign.clone()));
    }
    let alt = match r.altitude_ft {
        Some(a) => encode_altitude(a)?,
        None => ALTITUDE_INVALID,
    };
    let hvel = r.horizontal_velocity_kt.map_or(HVEL_INVALID, |v| v.min(0xFFE));
    let vvel = r
        .vertical_velocity_fpm
        .map_or(VVEL_INVALID, |v| (v as f64 / 64.0).round().clamp(-510.0, 510.0) as i16);
    let mut p = Vec::with_capacity(REPORT_BYTES - 1);
    p.push(((r.alert as u8) << 4) | (r.address_type & 0x0F));
    p.extend_from_slice(&r.address.to_be_bytes()[1..]);
    p.extend_from_slice(&to_semicircles(r.latitude).to_be_bytes()[1..]);
    p.extend_from_slice(&to_semicircles(r.longitude).to_be_bytes()[1..]);
    p.push((alt >> 4) as u8);
    p.push(((alt as u8 & 0x0F) << 4) | (r.misc & 0x0F));
    p.push((r.nic << 4) | (r.nacp & 0x0F));
    let vv = vvel as u16 & 0xFFF;
    p.push((hvel >> 4) as u8);
    p.push(((hvel as u8 & 0x0F) << 4) | (vv >> 8) as u8);
    p.push(vv as u8);
    p.push(((r.track_deg.rem_euclid(360.0) * 256.0 / 360.0).round() as u32 % 256) as u8);
    p.push(r.emitter_category);
    let mut cs = [b' '; 8];
    cs[..r.callsign.len()].copy_from_slice(r.callsign.as_bytes());
    p.extend_from_slice(&cs);
    p.push(r.emergency << 4);
    debug_assert_eq!(p.len(), REPORT_BYTES - 1);
    Ok(Gdl90Message { id, payload: p })
}

pub fn encode_traffic_report(address: u32, state: &KinematicState) -> Result<Gdl90Message, Gdl90Error> {
    encode_report(ID_TRAFFIC, &TrafficReport::from_state(address, state))
}

pub fn encode_ownship_report(address: u32, state: &KinematicState) -> Result<Gdl90Message, Gdl90Error> {
    encode_report(ID_OWNSHIP, &TrafficReport::from_state(address, state))
}

fn i24(b: &[u8]) -> i32 {
    (i32::from_be_bytes([b[0], b[1], b[2], 0])) >> 8
}

pub fn decode_report(m: &Gdl90Message) -> Option<TrafficReport> {
    if (m.id != ID_TRAFFIC && m.id != ID_OWNSHIP) || m.payload.len() != REPORT_BYTES - 1 {
        return None;
    }
    let p = &m.payload;
    let alt = ((p[10] as u16) << 4) | (p[11] >> 4) as u16;
    let hvel = ((p[13] as u16) << 4) | (p[14] >> 4) as u16;
    let vv = ((((p[14] & 0x0F) as u16) << 8 | p[15] as u16) << 4) as i16 >> 4;
    Some(TrafficReport {
        alert: p[0] >> 4 == 1,
        address_type: p[0] & 0x0F,
        address: u32::from_be_bytes([0, p[1], p[2], p[3]]),
        latitude: from_semicircles(i24(&p[4..7])),
        longitude: from_semicircles(i24(&p[7..10])),
        altitude_ft: (alt != ALTITUDE_INVALID).then_some(alt as f64 * 25.0 - 1000.0),
        misc: p[11] & 0x0F,
        nic: p[12] >> 4,
        nacp: p[12] & 0x0F,
        horizontal_velocity_kt: (hvel != HVEL_INVALID).then_some(hvel),
        vertical_velocity_fpm: (vv != VVEL_INVALID).then(|| vv as i32 * 64),
        track_deg: p[16] as f64 * 360.0 / 256.0,
        emitter_category: p[17],
        callsign: String::from_utf8_lossy(&p[18..26]).trim_end().to_string(),
        emergency: p[26] >> 4,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gdl90Payload {
    Heartbeat(Heartbeat),
    Ownship(TrafficReport),
    Traffic(TrafficReport),
    Other(Gdl90Message),
}

/// Interprets a message; diagnoses unsupported IDs and wrong lengths.
pub fn interpret(m: &Gdl90Message) -> (Gdl90Payload, Diagnosis) {
    let mut diag = Diagnosis::default();
    let expected = match m.id {
        ID_HEARTBEAT => HEARTBEAT_BYTES,
        ID_OWNSHIP | ID_TRAFFIC => REPORT_BYTES,
        other => {
            diag.push(Issue::UnknownTypecode(other));
            return (Gdl90Payload::Other(m.clone()), diag);
        }
    };
    if m.payload.len() + 1 != expected {
        diag.push(Issue::WrongLength { expected, got: m.payload.len() + 1 });
        return (Gdl90Payload::Other(m.clone()), diag);
    }
    let payload = match m.id {
        ID_HEARTBEAT => Gdl90Payload::Heartbeat(Heartbeat::from_message(m).expect("length checked")),
        ID_OWNSHIP => Gdl90Payload::Ownship(decode_report(m).expect("length checked")),
        _ => Gdl90Payload::Traffic(decode_report(m).expect("length checked")),
    };
    if let Gdl90Payload::Ownship(r) | Gdl90Payload::Traffic(r) = &payload {
        if r.latitude.abs() > 90.0 {
            diag.field("latitude");
        }
        if r.altitude_ft.is_some_and(|a| a > 101_350.0) {
            diag.field("altitude");
        }
    }
    (payload, diag)
}

pub fn describe(m: &Gdl90Message) -> String {
    match interpret(m).0 {
        Gdl90Payload::Heartbeat(h) => format!(
            "heartbeat status={:02X}{:02X} t={}s uplink={} basic/long={}",
            h.status1, h.status2, h.timestamp, h.uplink_count, h.basic_long_count
        ),
        Gdl90Payload::Ownship(r) | Gdl90Payload::Traffic(r) => format!(
            "{} addr={:06X} lat={:.5} lon={:.5} alt={} cs={:?}",
            if m.id == ID_OWNSHIP { "ownship" } else { "traffic" },
            r.address,
            r.latitude,
            r.longitude,
            r.altitude_ft.map_or("n/a".into(), |a| format!("{a}ft")),
            r.callsign
        ),
        Gdl90Payload::Other(o) => format!("id={} len={}", o.id, o.payload.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // The table form computes M(x) mod g(x) with no augmenting zeros; this
    // oracle does the same division one bit at a time.
    fn crc_bitwise(data: &[u8]) -> u16 {
        let mut rem: u32 = 0;
        for &b in data {
            for i in (0..8).rev() {
                rem = (rem << 1) | (b >> i & 1) as u32;
                if rem & 0x1_0000 != 0 {
                    rem ^= 0x1_1021;
                }
            }
        }
        rem as u16
    }

    #[test]
    fn table_matches_bitwise_crc() {
        for i in 0..256u16 {
            // table[i] = i * x^16 mod g
            assert_eq!(CRC_TABLE[i as usize], crc_bitwise(&[i as u8, 0, 0]));
        }
        let data: Vec<u8> = (0..=255).collect();
        assert_eq!(crc16(&data), crc_bitwise(&data));
        assert_eq!(CRC_TABLE[1], 0x1021);
    }

    #[test]
    fn heartbeat_reference_frame() {
        // Example heartbeat from the interface document.
        let m = Gdl90Message { id: 0, payload: vec![0x81, 0x41, 0xDB, 0xD0, 0x08, 0x02] };
        assert_eq!(frame(&m), [0x7E, 0x00, 0x81, 0x41, 0xDB, 0xD0, 0x08, 0x02, 0xB3, 0x8B, 0x7E]);
        let h = Heartbeat::from_message(&m).unwrap();
        assert_eq!(h.to_message(), m);
        assert_eq!(h.status1 & Heartbeat::GPS_VALID, Heartbeat::GPS_VALID);
    }

    #[test]
    fn escapes() {
        let m = Gdl90Message { id: 0x7E, payload: vec![0x7D, 0x7E, 0x00] };
        let f = frame(&m);
        assert_eq!(&f[1..3], &[0x7D, 0x5E]);
        assert_eq!(&f[3..5], &[0x7D, 0x5D]);
        assert!(f[1..f.len() - 1].iter().all(|&b| b != FLAG));
        assert_eq!(deframe(&f, false).message.unwrap(), m);
    }

    #[test]
    fn deframe_diagnoses() {
        assert!(deframe(&[0x7E, 0x00, 0x01], false).diagnosis.has("unterminated"));
        assert!(deframe(&[0x7E, 0x00, 0x7D, 0x11, 0x00, 0x7E], true).diagnosis.has("bad_escape"));
        assert!(deframe(&[0x7E, 0x7E], true).diagnosis.has("too_short"));
        assert!(deframe(&[], true).diagnosis.has("no_start_flag"));
        let mut f = frame(&Heartbeat::default().to_message());
        f[2] ^= 1;
        let d = deframe(&f, false);
        assert!(d.diagnosis.has("crc_failed") && d.message.is_none());
        assert!(deframe(&f, true).message.is_some());
    }

    #[test]
    fn semicircle_quantization() {
        assert_eq!(to_semicircles(0.0), 0);
        assert_eq!(to_semicircles(45.0), 1 << 21);
        // floor rounding: one LSB below 45 deg is the previous code
        let lsb = 180.0 / (1 << 23) as f64;
        assert_eq!(to_semicircles(45.0 - lsb / 2.0), (1 << 21) - 1);
        assert_eq!(to_semicircles(-lsb / 2.0), -1);
        assert_eq!(to_semicircles(180.0), -(1 << 23));
    }

    #[test]
    fn traffic_report_roundtrip() {
        let s = KinematicState {
            latitude: 37.7749,
            longitude: -122.4194,
            altitude_ft: 12_500.0,
            ground_speed_kt: 250.0,
            track_deg: 90.0,
            callsign: "N123AB".into(),
            ..KinematicState::default()
        };
        let m = encode_traffic_report(0xABCDEF, &s).unwrap();
        assert_eq!(m.to_bytes().len(), REPORT_BYTES);
        let r = decode_report(&m).unwrap();
        let lsb = 180.0 / (1 << 23) as f64;
        assert!((r.latitude - s.latitude).abs() <= lsb);
        assert!((r.longitude - s.longitude).abs() <= lsb);
        assert_eq!(r.altitude_ft, Some(12_500.0));
        assert_eq!(r.callsign, "N123AB");
        assert_eq!(r.address, 0xABCDEF);
        assert_eq!(r.horizontal_velocity_kt, Some(250));
        assert_eq!(r.track_deg, 90.0);
        let (p, d) = interpret(&m);
        assert!(d.is_empty() && matches!(p, Gdl90Payload::Traffic(_)));
    }

    #[test]
    fn zero_position_fields() {
        let m = encode_traffic_report(1, &KinematicState { latitude: 0.0, longitude: 0.0, ..Default::default() }).unwrap();
        assert_eq!(&m.payload[4..10], &[0; 6]);
    }

    #[test]
    fn altitude_range() {
        assert_eq!(encode_altitude(-1000.0), Ok(0));
        assert_eq!(encode_altitude(101_350.0), Ok(0xFFE));
        assert!(encode_altitude(101_375.0).is_err());
        assert!(encode_altitude(-1100.0).is_err());
    }

    #[test]
    fn vertical_velocity_sign() {
        let mut r = TrafficReport::from_state(1, &KinematicState::default());
        r.vertical_velocity_fpm = Some(-640);
        let back = decode_report(&encode_report(ID_TRAFFIC, &r).unwrap()).unwrap();
        assert_eq!(back.vertical_velocity_fpm, Some(-640));
        r.vertical_velocity_fpm = None;
        let back = decode_report(&encode_report(ID_TRAFFIC, &r).unwrap()).unwrap();
        assert_eq!(back.vertical_velocity_fpm, None);
    }
}
