//! One entry point over every codec, used by the harness, reconnaissance and
//! the CLI. Bits follow the per-protocol convention documented on [`Frame`].
//!
//! [`Frame`]: crate::frame::Frame

use std::fmt;

use crate::adsb::{self, AdsbMessage, DecodedFrame, EmergencyState};
use crate::ais::{self, AisDecoded, AisMessage};
use crate::ccsds::{self, DecodedPacket};
use crate::diag::Diagnosis;
use crate::epirb::{self, DecodedBeacon};
use crate::frame::Protocol;
use crate::gdl90::{self, Gdl90Message, Gdl90Payload};

/// Identity of a transmitter as seen by a passive listener.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TargetId {
    Icao(u32),
    Mmsi(u32),
    /// 15-hex-character beacon id.
    Beacon(String),
    /// GDL-90 traffic/ownship participant address.
    Address(u32),
    Apid(u16),
}

impl fmt::Display for TargetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetId::Icao(a) => write!(f, "icao:{a:06X}"),
            TargetId::Mmsi(m) => write!(f, "mmsi:{m:09}"),
            TargetId::Beacon(h) => write!(f, "beacon:{h}"),
            TargetId::Address(a) => write!(f, "addr:{a:06X}"),
            TargetId::Apid(a) => write!(f, "apid:{a}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlertKind {
    Emergency,
    Safety,
    Distress,
    Traffic,
    /// Closest point of approach inside the receiver's threshold.
    Collision,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Adsb(DecodedFrame),
    Ais(AisDecoded),
    Epirb { decoded: DecodedBeacon, id: Option<String> },
    Gdl90 { message: Option<Gdl90Message>, payload: Option<Gdl90Payload> },
    Ccsds(DecodedPacket),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub protocol: Protocol,
    pub payload: Payload,
    pub diagnosis: Diagnosis,
}

/// Total over all inputs. With `lenient = false` integrity failures withhold
/// the message, as a strict receiver would.
pub fn decode_any(protocol: Protocol, bits: &[bool], lenient: bool) -> Decoded {
    let (payload, diagnosis) = match protocol {
        Protocol::Adsb => {
            let d = adsb::decode_frame(bits, !lenient);
            let diag = d.diagnosis.clone();
            (Payload::Adsb(d), diag)
        }
        Protocol::Ais => {
            let d = ais::decode_message(bits);
            let diag = d.diagnosis.clone();
            (Payload::Ais(d), diag)
        }
        Protocol::Epirb => {
            let d = epirb::decode_beacon(bits, lenient);
            let diag = d.diagnosis.clone();
            let id = d.message.as_ref().and_then(|_| epirb::hex_id(bits));
            (Payload::Epirb { decoded: d, id }, diag)
        }
        Protocol::Gdl90 => {
            let bytes = pack(bits);
            let d = gdl90::deframe(&bytes, lenient);
            let mut diag = d.diagnosis;
            let payload = d.message.as_ref().map(|m| {
                let (p, extra) = gdl90::interpret(m);
                for i in extra.issues {
                    diag.push(i);
                }
                p
            });
            (Payload::Gdl90 { message: d.message, payload }, diag)
        }
        Protocol::Ccsds => {
            let d = ccsds::decode_packet(&pack(bits), lenient);
            let diag = d.diagnosis.clone();
            (Payload::Ccsds(d), diag)
        }
    };
    Decoded { protocol, payload, diagnosis }
}

fn pack(bits: &[bool]) -> Vec<u8> {
    crate::Bits::from_bools(bits.to_vec()).to_bytes()
}

impl Decoded {
    /// Whether a message came out at all.
    pub fn has_message(&self) -> bool {
        match &self.payload {
            Payload::Adsb(d) => d.message.is_some(),
            Payload::Ais(d) => d.message.is_some(),
            Payload::Epirb { decoded, .. } => decoded.message.is_some(),
            Payload::Gdl90 { message, .. } => message.is_some(),
            Payload::Ccsds(d) => d.packet.is_some(),
        }
    }

    pub fn identity(&self) -> Option<TargetId> {
        match &self.payload {
            Payload::Adsb(d) => d.message.as_ref().map(|_| TargetId::Icao(d.icao24)),
            Payload::Ais(d) => d.message.as_ref().map(|m| TargetId::Mmsi(m.mmsi())),
            Payload::Epirb { id, .. } => id.clone().map(TargetId::Beacon),
            Payload::Gdl90 { payload, .. } => match payload {
                Some(Gdl90Payload::Traffic(r)) | Some(Gdl90Payload::Ownship(r)) => Some(TargetId::Address(r.address)),
                _ => None,
            },
            Payload::Ccsds(d) => d.packet.as_ref().map(|p| TargetId::Apid(p.apid)),
        }
    }

    /// Decoded position in degrees, when the message alone carries one.
    /// ADS-B positions need an even/odd pair and are handled by the caller.
    pub fn position(&self) -> Option<(f64, f64)> {
        match &self.payload {
            Payload::Ais(d) => d.message.as_ref()?.position(),
            Payload::Epirb { decoded, .. } => decoded.message.as_ref()?.position,
            Payload::Gdl90 { payload: Some(Gdl90Payload::Traffic(r) | Gdl90Payload::Ownship(r)), .. } => {
                Some((r.latitude, r.longitude))
            }
            _ => None,
        }
    }

    /// Alert an operator display would raise for this message alone.
    pub fn alert(&self) -> Option<AlertKind> {
        match &self.payload {
            Payload::Adsb(d) => match d.message.as_ref()? {
                AdsbMessage::EmergencyStatus(e) if e.emergency != EmergencyState::None => Some(AlertKind::Emergency),
                AdsbMessage::AirbornePosition(p) if p.surveillance_status == 1 => Some(AlertKind::Emergency),
                _ => None,
            },
            Payload::Ais(d) => match d.message.as_ref()? {
                AisMessage::Safety(_) => Some(AlertKind::Safety),
                _ => None,
            },
            Payload::Epirb { decoded, .. } => {
                decoded.message.as_ref().filter(|m| !m.self_test).map(|_| AlertKind::Distress)
            }
            Payload::Gdl90 { payload: Some(Gdl90Payload::Traffic(r)), .. } if r.alert || r.emergency != 0 => {
                Some(AlertKind::Traffic)
            }
            _ => None,
        }
    }

    /// Short kind label for histograms and inventories.
    pub fn kind(&self) -> &'static str {
        match &self.payload {
            Payload::Adsb(d) => match &d.message {
                Some(AdsbMessage::Identification(_)) => "identification",
                Some(AdsbMessage::AirbornePosition(_)) => "position",
                Some(AdsbMessage::Velocity(_)) => "velocity",
                Some(AdsbMessage::EmergencyStatus(_)) => "emergency",
                Some(AdsbMessage::Unknown { .. }) => "unknown",
                None => "none",
            },
            Payload::Ais(d) => match &d.message {
                Some(AisMessage::Position(_)) => "position_report",
                Some(AisMessage::Safety(_)) => "safety_broadcast",
                Some(AisMessage::ClassB(_)) => "class_b_position",
                None => "none",
            },
            Payload::Epirb { decoded, .. } => {
                if decoded.message.is_some() {
                    "beacon"
                } else {
                    "none"
                }
            }
            Payload::Gdl90 { payload, .. } => match payload {
                Some(Gdl90Payload::Heartbeat(_)) => "heartbeat",
                Some(Gdl90Payload::Traffic(_)) => "traffic",
                Some(Gdl90Payload::Ownship(_)) => "ownship",
                Some(_) => "other",
                None => "none",
            },
            Payload::Ccsds(d) => {
                if d.packet.is_some() {
                    "packet"
                } else {
                    "none"
                }
            }
        }
    }

    /// One-line rendering for CLI output.
    pub fn describe(&self) -> String {
        let body = match &self.payload {
            Payload::Adsb(d) => adsb::describe(d),
            Payload::Ais(d) => match &d.message {
                Some(m) => ais::describe(m),
                None => "no message".into(),
            },
            Payload::Epirb { decoded, id } => match &decoded.message {
                Some(m) => format!("beacon {} {:?} {:?}", id.as_deref().unwrap_or("?"), m.identity, m.position),
                None => "no message".into(),
            },
            Payload::Gdl90 { message, .. } => match message {
                Some(m) => gdl90::describe(m),
                None => "no message".into(),
            },
            Payload::Ccsds(d) => match &d.packet {
                Some(p) => ccsds::describe(p),
                None => "no packet".into(),
            },
        };
        if self.diagnosis.is_empty() || matches!(self.payload, Payload::Adsb(_)) {
            body
        } else {
            format!("{body} [{}]", self.diagnosis)
        }
    }
}
