//! Named bit fields per protocol, for raw overrides and field-aware fuzzing.
//!
//! Offsets are bit positions in the frame as held in a schedule, except for
//! GDL-90 where they index the unframed message (id byte first): framing and
//! its CRC are applied afterwards.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::AttackError;
use crate::adsb::{ModeSFrame, FRAME_BITS};
use crate::bits::{read_uint, Bits};
use crate::epirb::bch::{self, BchCode};
use crate::epirb::LONG_MESSAGE_BITS;
use crate::frame::Protocol;

#[derive(Debug, Clone, Copy)]
pub struct FieldSpec {
    pub name: &'static str,
    pub offset: usize,
    pub width: usize,
    /// Whether the field exists in this particular frame.
    pub applies: fn(&[bool]) -> bool,
}

impl FieldSpec {
    pub fn fits(&self, bits: &[bool]) -> bool {
        self.offset + self.width <= bits.len() && (self.applies)(bits)
    }

    pub fn max(&self) -> u64 {
        if self.width >= 64 {
            u64::MAX
        } else {
            (1 << self.width) - 1
        }
    }
}

fn always(_: &[bool]) -> bool {
    true
}
fn adsb_ident(b: &[bool]) -> bool {
    (1..=4).contains(&read_uint(b, 32, 5))
}
fn adsb_position(b: &[bool]) -> bool {
    (9..=18).contains(&read_uint(b, 32, 5))
}
fn adsb_velocity(b: &[bool]) -> bool {
    read_uint(b, 32, 5) == 19
}
fn adsb_status(b: &[bool]) -> bool {
    read_uint(b, 32, 5) == 28
}
fn ais_class_a(b: &[bool]) -> bool {
    (1..=3).contains(&read_uint(b, 0, 6))
}
fn ais_safety(b: &[bool]) -> bool {
    read_uint(b, 0, 6) == 14
}
fn ais_class_b(b: &[bool]) -> bool {
    read_uint(b, 0, 6) == 18
}
fn epirb_user(b: &[bool]) -> bool {
    b.get(25) == Some(&true)
}
fn epirb_standard(b: &[bool]) -> bool {
    b.get(25) == Some(&false)
}
fn gdl90_report(b: &[bool]) -> bool {
    matches!(read_uint(b, 0, 8), 10 | 20)
}
fn gdl90_heartbeat(b: &[bool]) -> bool {
    read_uint(b, 0, 8) == 0
}

macro_rules! f {
    ($name:expr, $off:expr, $w:expr, $app:ident) => {
        FieldSpec { name: $name, offset: $off, width: $w, applies: $app }
    };
}

const ADSB: &[FieldSpec] = &[
    f!("df", 0, 5, always),
    f!("ca", 5, 3, always),
    f!("icao", 8, 24, always),
    f!("tc", 32, 5, always),
    f!("me", 32, 56, always),
    f!("parity", 88, 24, always),
    f!("category", 37, 3, adsb_ident),
    f!("callsign", 40, 48, adsb_ident),
    f!("ss", 37, 2, adsb_position),
    f!("saf", 39, 1, adsb_position),
    f!("alt", 40, 12, adsb_position),
    f!("t", 52, 1, adsb_position),
    f!("f", 53, 1, adsb_position),
    f!("lat_cpr", 54, 17, adsb_position),
    f!("lon_cpr", 71, 17, adsb_position),
    f!("subtype", 37, 3, adsb_velocity),
    f!("ew_sign", 45, 1, adsb_velocity),
    f!("ew_vel", 46, 10, adsb_velocity),
    f!("ns_sign", 56, 1, adsb_velocity),
    f!("ns_vel", 57, 10, adsb_velocity),
    f!("vr_sign", 68, 1, adsb_velocity),
    f!("vr", 69, 9, adsb_velocity),
    f!("subtype", 37, 3, adsb_status),
    f!("emergency", 40, 3, adsb_status),
    f!("squawk", 43, 13, adsb_status),
];

const AIS: &[FieldSpec] = &[
    f!("msg_type", 0, 6, always),
    f!("repeat", 6, 2, always),
    f!("mmsi", 8, 30, always),
    f!("nav_status", 38, 4, ais_class_a),
    f!("rot", 42, 8, ais_class_a),
    f!("sog", 50, 10, ais_class_a),
    f!("accuracy", 60, 1, ais_class_a),
    f!("lon", 61, 28, ais_class_a),
    f!("lat", 89, 27, ais_class_a),
    f!("cog", 116, 12, ais_class_a),
    f!("heading", 128, 9, ais_class_a),
    f!("timestamp", 137, 6, ais_class_a),
    f!("maneuver", 143, 2, ais_class_a),
    f!("raim", 148, 1, ais_class_a),
    f!("radio", 149, 19, ais_class_a),
    f!("spare", 38, 2, ais_safety),
    f!("sog", 46, 10, ais_class_b),
    f!("accuracy", 56, 1, ais_class_b),
    f!("lon", 57, 28, ais_class_b),
    f!("lat", 85, 27, ais_class_b),
    f!("cog", 112, 12, ais_class_b),
    f!("heading", 124, 9, ais_class_b),
    f!("timestamp", 133, 6, ais_class_b),
];

const EPIRB: &[FieldSpec] = &[
    f!("bit_sync", 0, 15, always),
    f!("frame_sync", 15, 9, always),
    f!("format", 24, 1, always),
    f!("protocol_flag", 25, 1, always),
    f!("country", 26, 10, always),
    f!("pdf1", 24, 61, always),
    f!("bch1", 85, 21, always),
    f!("pdf2", 106, 26, always),
    f!("bch2", 132, 12, always),
    f!("user_protocol", 36, 3, epirb_user),
    f!("identity", 39, 44, epirb_user),
    f!("homing", 83, 2, epirb_user),
    f!("std_protocol", 36, 4, epirb_standard),
    f!("identity", 40, 24, epirb_standard),
    f!("lat_coarse", 64, 10, epirb_standard),
    f!("lon_coarse", 74, 11, epirb_standard),
];

const GDL90: &[FieldSpec] = &[
    f!("id", 0, 8, always),
    f!("alert", 8, 4, gdl90_report),
    f!("address_type", 12, 4, gdl90_report),
    f!("address", 16, 24, gdl90_report),
    f!("lat", 40, 24, gdl90_report),
    f!("lon", 64, 24, gdl90_report),
    f!("altitude", 88, 12, gdl90_report),
    f!("misc", 100, 4, gdl90_report),
    f!("nic", 104, 4, gdl90_report),
    f!("nacp", 108, 4, gdl90_report),
    f!("hvel", 112, 12, gdl90_report),
    f!("vvel", 124, 12, gdl90_report),
    f!("track", 136, 8, gdl90_report),
    f!("emitter", 144, 8, gdl90_report),
    f!("callsign", 152, 64, gdl90_report),
    f!("emergency", 216, 4, gdl90_report),
    f!("spare", 220, 4, gdl90_report),
    f!("status1", 8, 8, gdl90_heartbeat),
    f!("status2", 16, 8, gdl90_heartbeat),
    f!("timestamp", 24, 16, gdl90_heartbeat),
    f!("counts", 40, 16, gdl90_heartbeat),
];

const CCSDS: &[FieldSpec] = &[
    f!("version", 0, 3, always),
    f!("type", 3, 1, always),
    f!("sec_hdr", 4, 1, always),
    f!("apid", 5, 11, always),
    f!("seq_flags", 16, 2, always),
    f!("seq_count", 18, 14, always),
    f!("length", 32, 16, always),
];

pub fn field_map(protocol: Protocol) -> &'static [FieldSpec] {
    match protocol {
        Protocol::Adsb => ADSB,
        Protocol::Ais => AIS,
        Protocol::Epirb => EPIRB,
        Protocol::Gdl90 => GDL90,
        Protocol::Ccsds => CCSDS,
    }
}

pub fn field_names(protocol: Protocol) -> Vec<&'static str> {
    let mut v: Vec<_> = field_map(protocol).iter().map(|f| f.name).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Field value as written in a scenario: an integer (negative values are
/// stored two's complement) or a string `0x..`, `0b..` or decimal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawValue {
    Int(i64),
    Text(String),
}

impl RawValue {
    pub fn resolve(&self, name: &str, width: usize) -> Result<u64, AttackError> {
        let bad = || AttackError::Override(format!("{name}: value {self:?} does not fit {width} bits"));
        let v = match self {
            RawValue::Int(i) if *i < 0 => {
                if width < 64 && *i < -(1i64 << (width - 1)) {
                    return Err(bad());
                }
                let mask = if width >= 64 { u64::MAX } else { (1 << width) - 1 };
                return Ok(*i as u64 & mask);
            }
            RawValue::Int(i) => *i as u64,
            RawValue::Text(s) => {
                let t = s.trim().replace('_', "");
                let parsed = if let Some(h) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
                    u64::from_str_radix(h, 16)
                } else if let Some(b) = t.strip_prefix("0b") {
                    u64::from_str_radix(b, 2)
                } else {
                    t.parse::<u64>()
                };
                parsed.map_err(|_| AttackError::Override(format!("{name}: cannot parse {s:?}")))?
            }
        };
        if width < 64 && v >> width != 0 {
            return Err(bad());
        }
        Ok(v)
    }
}

impl std::str::FromStr for RawValue {
    type Err = std::convert::Infallible;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().parse::<i64>() {
            Ok(i) => RawValue::Int(i),
            Err(_) => RawValue::Text(s.trim().to_string()),
        })
    }
}

/// Checks every override names a known field.
pub fn check_names(protocol: Protocol, overrides: &BTreeMap<String, RawValue>) -> Result<(), AttackError> {
    let map = field_map(protocol);
    for k in overrides.keys() {
        if !map.iter().any(|f| f.name == k) {
            return Err(AttackError::Override(format!(
                "unknown {protocol} field {k:?}; known fields: {}",
                field_names(protocol).join(", ")
            )));
        }
    }
    Ok(())
}

/// Writes each override into `bits` where the field exists. Returns the
/// number of fields written.
pub fn apply_overrides(
    protocol: Protocol,
    bits: &mut Bits,
    overrides: &BTreeMap<String, RawValue>,
) -> Result<usize, AttackError> {
    check_names(protocol, overrides)?;
    let mut n = 0;
    // type-selecting fields first so dependent fields see the new type
    let selectors = ["df", "tc", "msg_type", "id", "protocol_flag"];
    let mut keys: Vec<&String> = overrides.keys().collect();
    keys.sort_by_key(|k| !selectors.contains(&k.as_str()));
    for k in keys {
        let Some(spec) = field_map(protocol).iter().find(|f| f.name == k && f.fits(bits)) else {
            continue;
        };
        let v = overrides[k].resolve(k, spec.width)?;
        bits.set_uint(spec.offset, spec.width, v);
        n += 1;
    }
    Ok(n)
}

/// Recomputes the checksum fields a frame carries, unless `keep` names one
/// of them. AIS and GDL-90 checksums belong to framing and need nothing here.
pub fn fix_integrity(protocol: Protocol, bits: &mut Bits, keep: &dyn Fn(&str) -> bool) {
    match protocol {
        Protocol::Adsb if bits.len() == FRAME_BITS && !keep("parity") => {
            if let Ok(mut f) = ModeSFrame::from_bits(bits) {
                f.fix_parity();
                *bits = f.to_bits();
            }
        }
        Protocol::Epirb if bits.len() == LONG_MESSAGE_BITS => {
            if !keep("bch1") {
                let r = bch::remainder(BchCode::Bch1, bits.uint(24, 61));
                bits.set_uint(85, 21, r);
            }
            if !keep("bch2") {
                let r = bch::remainder(BchCode::Bch2, bits.uint(106, 26));
                bits.set_uint(132, 12, r);
            }
        }
        _ => {}
    }
}

/// Applies overrides to one frame in schedule form and recomputes every
/// checksum not itself overridden. GDL-90 frames are deframed first and
/// re-framed after. `None` when no overridden field exists in the frame.
pub fn override_frame(
    protocol: Protocol,
    frame: &Bits,
    overrides: &BTreeMap<String, RawValue>,
) -> Result<Option<Bits>, AttackError> {
    let mut bits = if protocol == Protocol::Gdl90 {
        match crate::gdl90::deframe(&frame.to_bytes(), true).message {
            Some(m) => Bits::from_bytes(&m.to_bytes()),
            None => return Ok(None),
        }
    } else {
        frame.clone()
    };
    if apply_overrides(protocol, &mut bits, overrides)? == 0 {
        return Ok(None);
    }
    fix_integrity(protocol, &mut bits, &|f| overrides.contains_key(f));
    if protocol == Protocol::Gdl90 {
        bits = Bits::from_bytes(&crate::gdl90::frame_bytes(&bits.to_bytes()));
    }
    Ok(Some(bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adsb::{decode_frame, encode_identification};

    #[test]
    fn adsb_offsets_match_codec() {
        let f = ModeSFrame::from_hex("8D4840D6202CC371C32CE0576098").unwrap();
        let b = f.to_bits();
        let get = |n: &str| {
            let s = ADSB.iter().find(|s| s.name == n && s.fits(&b)).unwrap();
            b.uint(s.offset, s.width)
        };
        assert_eq!(get("icao"), 0x4840D6);
        assert_eq!(get("tc"), 4);
        assert_eq!(get("parity"), 0x576098);
    }

    #[test]
    fn override_keeps_crc_valid() {
        let mut b = encode_identification(0x4840D6, "KLM1023").unwrap().to_bits();
        let mut o = BTreeMap::new();
        o.insert("callsign".to_string(), RawValue::Text("0xFFFFFFFFFFFF".into()));
        assert_eq!(apply_overrides(Protocol::Adsb, &mut b, &o).unwrap(), 1);
        fix_integrity(Protocol::Adsb, &mut b, &|_| false);
        let d = decode_frame(&b, true);
        assert!(!d.diagnosis.has("crc_failed"));
        assert!(d.diagnosis.has("field_out_of_range"));
    }

    #[test]
    fn raw_values() {
        assert_eq!(RawValue::Int(-1).resolve("x", 8).unwrap(), 0xFF);
        assert_eq!(RawValue::Text("0b101".into()).resolve("x", 3).unwrap(), 5);
        assert!(RawValue::Int(256).resolve("x", 8).is_err());
        assert!(RawValue::Int(-129).resolve("x", 8).is_err());
        assert_eq!("0x1F".parse::<RawValue>().unwrap().resolve("x", 5).unwrap(), 31);
    }

    #[test]
    fn unknown_field_lists_known() {
        let mut o = BTreeMap::new();
        o.insert("nope".into(), RawValue::Int(1));
        let e = check_names(Protocol::Ccsds, &o).unwrap_err().to_string();
        assert!(e.contains("apid"));
    }
}
