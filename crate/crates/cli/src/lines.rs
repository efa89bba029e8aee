//! `key=value` message descriptions for `saamd encode`, one message per line.
//!
//! ```text
//! msg=ident icao=4840D6 callsign=KLM1023
//! msg=position icao=4840D6 lat=52.2572 lon=3.9194 alt=38000 cpr=even t=0.5
//! msg=safety mmsi=244123456 text="MAN OVERBOARD"
//! hex=8D4840D6202CC371C32CE0576098
//! ```

use std::collections::BTreeMap;

use saamd::adsb::{self, CprFormat, KinematicState};
use saamd::ais::{self, VesselReport};
use saamd::attack::parse_emergency;
use saamd::ccsds::{self, PacketType, SpacePacket};
use saamd::epirb::{self, BeaconMessage, LocationScheme};
use saamd::gdl90::{self, Heartbeat};
use saamd::{Bits, Protocol};

/// One parsed line: optional time in seconds and the frame as scheduled.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoded {
    pub t: Option<f64>,
    pub bits: Bits,
}

/// Splits on whitespace; values may be double-quoted to hold spaces.
pub fn tokenize(line: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    let mut chars = line.trim().chars().peekable();
    loop {
        while chars.next_if(|c| c.is_whitespace()).is_some() {}
        if chars.peek().is_none() {
            break;
        }
        let key: String = std::iter::from_fn(|| chars.next_if(|c| *c != '=' && !c.is_whitespace())).collect();
        if chars.next() != Some('=') {
            return Err(format!("expected key=value, got {key:?}"));
        }
        let value = if chars.next_if_eq(&'"').is_some() {
            let v: String = std::iter::from_fn(|| chars.next_if(|c| *c != '"')).collect();
            if chars.next() != Some('"') {
                return Err(format!("unterminated quote in {key}"));
            }
            v
        } else {
            std::iter::from_fn(|| chars.next_if(|c| !c.is_whitespace())).collect()
        };
        if out.insert(key.clone(), value).is_some() {
            return Err(format!("duplicate key {key}"));
        }
    }
    Ok(out)
}

struct Fields(BTreeMap<String, String>);

impl Fields {
    fn take(&mut self, k: &str) -> Option<String> {
        self.0.remove(k)
    }

    fn req(&mut self, k: &str) -> Result<String, String> {
        self.take(k).ok_or_else(|| format!("missing {k}="))
    }

    fn num<T: std::str::FromStr>(&mut self, k: &str) -> Result<Option<T>, String> {
        self.take(k)
            .map(|v| v.parse::<T>().map_err(|_| format!("bad {k} value {v:?}")))
            .transpose()
    }

    fn num_req<T: std::str::FromStr>(&mut self, k: &str) -> Result<T, String> {
        self.num(k)?.ok_or_else(|| format!("missing {k}="))
    }

    fn hex(&mut self, k: &str) -> Result<Option<u32>, String> {
        self.take(k)
            .map(|v| {
                let t = v.trim_start_matches("0x");
                u32::from_str_radix(t, 16).map_err(|_| format!("bad {k} value {v:?}"))
            })
            .transpose()
    }

    fn flag(&mut self, k: &str) -> Result<bool, String> {
        match self.take(k).as_deref() {
            None | Some("0") | Some("false") => Ok(false),
            Some("1") | Some("true") => Ok(true),
            Some(v) => Err(format!("bad {k} value {v:?}")),
        }
    }

    fn position(&mut self) -> Result<Option<(f64, f64)>, String> {
        match (self.num::<f64>("lat")?, self.num::<f64>("lon")?) {
            (Some(a), Some(b)) => Ok(Some((a, b))),
            (None, None) => Ok(None),
            _ => Err("lat= and lon= go together".into()),
        }
    }

    fn kinematics(&mut self) -> Result<KinematicState, String> {
        Ok(KinematicState {
            latitude: self.num("lat")?.unwrap_or(0.0),
            longitude: self.num("lon")?.unwrap_or(0.0),
            altitude_ft: self.num("alt")?.unwrap_or(0.0),
            ground_speed_kt: self.num("gs")?.unwrap_or(0.0),
            track_deg: self.num("track")?.unwrap_or(0.0),
            callsign: self.take("callsign").unwrap_or_default(),
            squawk_emergency: false,
        })
    }

    fn finish(self) -> Result<(), String> {
        match self.0.keys().next() {
            Some(k) => Err(format!("unknown key {k}=")),
            None => Ok(()),
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Encodes one line; blank lines and `#` comments give `None`.
pub fn encode_line(protocol: Protocol, line: &str) -> Result<Option<Encoded>, String> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let mut f = Fields(tokenize(line)?);
    let t: Option<f64> = f.num("t")?;
    if let Some(t) = t {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(format!("bad t value {t}"));
        }
    }
    if let Some(h) = f.take("hex") {
        let bits = match h.split_once('/') {
            Some((hex, n)) => Bits::from_hex(hex, Some(n.parse().map_err(|_| format!("bad bit count {n:?}"))?)),
            None => Bits::from_hex(&h, None),
        }
        .map_err(err)?;
        f.finish()?;
        return Ok(Some(Encoded { t, bits }));
    }
    let msg = f.req("msg")?;
    let bits = match protocol {
        Protocol::Adsb => {
            let icao = f.hex("icao")?.ok_or("missing icao=")?;
            let frame = match msg.as_str() {
                "ident" => adsb::encode_identification(icao, &f.req("callsign")?),
                "position" => {
                    let fmt = match f.take("cpr").as_deref() {
                        None | Some("even") => CprFormat::Even,
                        Some("odd") => CprFormat::Odd,
                        Some(v) => return Err(format!("bad cpr value {v:?}")),
                    };
                    let st = f.kinematics()?;
                    adsb::encode_airborne_position(icao, &st, fmt)
                }
                "velocity" => adsb::encode_velocity(icao, &f.kinematics()?),
                "emergency" => adsb::encode_emergency(icao, parse_emergency(&f.req("emergency")?).map_err(err)?),
                other => return Err(format!("unknown adsb msg {other:?} (ident, position, velocity, emergency)")),
            };
            frame.map_err(err)?.to_bits()
        }
        Protocol::Ais => {
            let mmsi = f.num_req("mmsi")?;
            let m = match msg.as_str() {
                "position" | "classb" => {
                    let r = VesselReport {
                        mmsi,
                        lat: f.num("lat")?,
                        lon: f.num("lon")?,
                        sog_kt: f.num("sog")?,
                        cog_deg: f.num("cog")?,
                        heading: f.num("heading")?,
                        nav_status: f.num("nav")?.unwrap_or(0),
                    };
                    if msg == "position" {
                        ais::encode_position_report(&r)
                    } else {
                        ais::encode_class_b(&r)
                    }
                }
                "safety" => ais::encode_safety_broadcast(mmsi, &f.req("text")?),
                other => return Err(format!("unknown ais msg {other:?} (position, classb, safety)")),
            };
            m.map_err(err)?.to_bits()
        }
        Protocol::Epirb => {
            let mut b = match msg.as_str() {
                "maritime" => BeaconMessage::maritime(f.num_req("mmsi")?, f.num("beacon")?.unwrap_or(0), f.position()?),
                "elt" => BeaconMessage::elt(
                    f.num_req("country")?,
                    f.hex("icao")?.ok_or("missing icao=")?,
                    f.position()?,
                ),
                "plb" => BeaconMessage::plb(f.num_req("country")?, f.num_req("serial")?, f.num("cert")?.unwrap_or(0), f.position()?),
                other => return Err(format!("unknown epirb msg {other:?} (maritime, elt, plb)")),
            };
            b.self_test = f.flag("self_test")?;
            b.scheme = match f.take("scheme").as_deref() {
                None | Some("user") => LocationScheme::User,
                Some("standard") => LocationScheme::Standard,
                Some(v) => return Err(format!("bad scheme value {v:?}")),
            };
            epirb::encode_beacon(&b).map_err(err)?
        }
        Protocol::Gdl90 => {
            let m = match msg.as_str() {
                "heartbeat" => Heartbeat {
                    status1: f.num("status1")?.unwrap_or(Heartbeat::GPS_VALID | Heartbeat::UAT_INITIALIZED),
                    status2: f.num("status2")?.unwrap_or(Heartbeat::UTC_OK),
                    timestamp: f.num("timestamp")?.unwrap_or(0),
                    uplink_count: 0,
                    basic_long_count: 0,
                }
                .to_message(),
                "traffic" | "ownship" => {
                    let addr = f.hex("addr")?.ok_or("missing addr=")?;
                    let st = f.kinematics()?;
                    let r = if msg == "traffic" {
                        gdl90::encode_traffic_report(addr, &st)
                    } else {
                        gdl90::encode_ownship_report(addr, &st)
                    };
                    r.map_err(err)?
                }
                other => return Err(format!("unknown gdl90 msg {other:?} (heartbeat, traffic, ownship)")),
            };
            Bits::from_bytes(&gdl90::frame(&m))
        }
        Protocol::Ccsds => {
            let packet_type = match msg.as_str() {
                "tc" => PacketType::Telecommand,
                "tm" => PacketType::Telemetry,
                other => return Err(format!("unknown ccsds msg {other:?} (tc, tm)")),
            };
            let payload = hex::decode(f.take("payload").unwrap_or_else(|| "00".into())).map_err(err)?;
            let p = SpacePacket {
                packet_type,
                ..SpacePacket::telecommand(f.num_req("apid")?, f.num("seq")?.unwrap_or(0), payload)
            };
            Bits::from_bytes(&ccsds::encode_packet(&p).map_err(err)?)
        }
    };
    f.finish()?;
    Ok(Some(Encoded { t, bits }))
}

/// Default spacing between untimed lines, in microseconds.
pub fn default_spacing_us(protocol: Protocol) -> u64 {
    match protocol {
        Protocol::Ais => 100_000,
        Protocol::Epirb => 1_000_000,
        _ => 1_000,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use saamd::decode::decode_any;

    #[test]
    fn quoted_values() {
        let t = tokenize(r#"msg=safety mmsi=1 text="MAN OVERBOARD""#).unwrap();
        assert_eq!(t["text"], "MAN OVERBOARD");
        assert!(tokenize("msg").is_err());
        assert!(tokenize(r#"text="open"#).is_err());
        assert!(tokenize("a=1 a=2").is_err());
    }

    #[test]
    fn klm_ident_matches_reference() {
        let e = encode_line(Protocol::Adsb, "msg=ident icao=4840D6 callsign=KLM1023").unwrap().unwrap();
        assert_eq!(e.bits.to_hex(), "8D4840D6202CC371C32CE0576098");
    }

    #[test]
    fn every_protocol_decodes_strictly() {
        let cases = [
            (Protocol::Adsb, "msg=position icao=ABCDEF lat=40 lon=-70 alt=30000 cpr=odd"),
            (Protocol::Adsb, "msg=velocity icao=ABCDEF gs=300 track=45"),
            (Protocol::Adsb, "msg=emergency icao=ABCDEF emergency=medical"),
            (Protocol::Ais, "msg=position mmsi=244123456 lat=52 lon=4 sog=10 cog=90 heading=90"),
            (Protocol::Ais, "msg=classb mmsi=244123456 lat=52 lon=4"),
            (Protocol::Ais, r#"msg=safety mmsi=244123456 text="HELLO""#),
            (Protocol::Epirb, "msg=maritime mmsi=244123456 lat=52 lon=4"),
            (Protocol::Epirb, "msg=elt country=227 icao=3C6444"),
            (Protocol::Epirb, "msg=plb country=366 serial=1234 scheme=user"),
            (Protocol::Gdl90, "msg=heartbeat"),
            (Protocol::Gdl90, "msg=traffic addr=ABCDEF lat=45 lon=-122 alt=5000 callsign=N12345"),
            (Protocol::Ccsds, "msg=tc apid=100 seq=7 payload=DEADBEEF"),
        ];
        for (p, line) in cases {
            let e = encode_line(p, line).unwrap().unwrap();
            let d = decode_any(p, &e.bits, false);
            assert!(d.has_message() && d.diagnosis.is_empty(), "{line}: {}", d.describe());
        }
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(encode_line(Protocol::Adsb, "msg=ident icao=1 callsign=A extra=1").is_err());
        assert!(encode_line(Protocol::Adsb, "msg=warp icao=1").is_err());
        assert!(encode_line(Protocol::Ais, "msg=position mmsi=1 sog=500").is_err());
        assert!(encode_line(Protocol::Adsb, "msg=ident icao=1 callsign=A t=-1").is_err());
        assert_eq!(encode_line(Protocol::Adsb, "  # comment").unwrap(), None);
    }

    #[test]
    fn raw_hex_passthrough() {
        let e = encode_line(Protocol::Epirb, "hex=ABC/10 t=2").unwrap().unwrap();
        assert_eq!(e.bits.len(), 10);
        assert_eq!(e.t, Some(2.0));
    }
}
