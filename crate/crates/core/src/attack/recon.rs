//! Passive reconnaissance: what a listener learns from traffic on the air.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::adsb::{cpr, AdsbMessage, CprFormat, CprPosition};
use crate::ais::AisMessage;
use crate::decode::{decode_any, Payload, TargetId};
use crate::frame::{FrameSchedule, Protocol};
use crate::gdl90::Gdl90Payload;
use crate::modem::{self, IqBuffer, ModemConfig};

/// Even/odd CPR frames further apart than this are not paired.
pub const CPR_PAIR_WINDOW_US: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct InventoryRow {
    pub id: TargetId,
    pub first_seen_us: u64,
    pub last_seen_us: u64,
    pub messages: u64,
    /// Message count per kind label.
    pub counts: BTreeMap<String, u64>,
    pub last_position: Option<(f64, f64)>,
    pub last_altitude_ft: Option<f64>,
    /// Callsign or broadcast text.
    pub label: Option<String>,
    /// (timestamp µs, lat, lon).
    pub track: Vec<(u64, f64, f64)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Inventory {
    /// Ordered by first sighting.
    pub rows: Vec<InventoryRow>,
    /// Frames that did not strictly decode.
    pub undecoded: u64,
}

impl Inventory {
    pub fn row(&self, id: &TargetId) -> Option<&InventoryRow> {
        self.rows.iter().find(|r| &r.id == id)
    }

    pub fn to_table(&self) -> String {
        let mut s = String::from("id\tfirst_s\tlast_s\tmessages\tkinds\tlat\tlon\talt_ft\tlabel\n");
        for r in &self.rows {
            let kinds: Vec<String> = r.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let (lat, lon) = match r.last_position {
                Some((a, b)) => (format!("{a:.5}"), format!("{b:.5}")),
                None => ("-".into(), "-".into()),
            };
            let _ = writeln!(
                s,
                "{}\t{:.3}\t{:.3}\t{}\t{}\t{lat}\t{lon}\t{}\t{}",
                r.id,
                r.first_seen_us as f64 / 1e6,
                r.last_seen_us as f64 / 1e6,
                r.messages,
                kinds.join(","),
                r.last_altitude_ft.map_or("-".into(), |a| format!("{a:.0}")),
                r.label.as_deref().unwrap_or("-"),
            );
        }
        let _ = writeln!(s, "# undecoded={}", self.undecoded);
        s
    }
}

#[derive(Default)]
struct CprState {
    even: Option<(u64, CprPosition)>,
    odd: Option<(u64, CprPosition)>,
}

/// Builds an inventory from timestamped frames, decoding strictly.
pub fn gen_reconnaissance<'a>(protocol: Protocol, frames: impl IntoIterator<Item = (u64, &'a [bool])>) -> Inventory {
    let mut rows: Vec<InventoryRow> = Vec::new();
    let mut index: HashMap<TargetId, usize> = HashMap::new();
    let mut cpr_state: HashMap<u32, CprState> = HashMap::new();
    let mut undecoded = 0;
    for (ts, bits) in frames {
        let d = decode_any(protocol, bits, false);
        let Some(id) = d.identity().filter(|_| d.has_message()) else {
            undecoded += 1;
            continue;
        };
        let i = *index.entry(id.clone()).or_insert_with(|| {
            rows.push(InventoryRow {
                id,
                first_seen_us: ts,
                last_seen_us: ts,
                messages: 0,
                counts: BTreeMap::new(),
                last_position: None,
                last_altitude_ft: None,
                label: None,
                track: Vec::new(),
            });
            rows.len() - 1
        });
        let row = &mut rows[i];
        row.first_seen_us = row.first_seen_us.min(ts);
        row.last_seen_us = row.last_seen_us.max(ts);
        row.messages += 1;
        *row.counts.entry(d.kind().to_string()).or_default() += 1;
        let mut pos = d.position();
        match &d.payload {
            Payload::Adsb(f) => match &f.message {
                Some(AdsbMessage::Identification(m)) => row.label = Some(m.callsign.clone()),
                Some(AdsbMessage::AirbornePosition(p)) => {
                    row.last_altitude_ft = p.altitude_ft.map(f64::from).or(row.last_altitude_ft);
                    let st = cpr_state.entry(f.icao24).or_default();
                    let other = match p.cpr.format {
                        CprFormat::Even => {
                            st.even = Some((ts, p.cpr));
                            st.odd
                        }
                        CprFormat::Odd => {
                            st.odd = Some((ts, p.cpr));
                            st.even
                        }
                    };
                    if let (Some((t0, _)), Some((_, e)), Some((_, o))) = (other, st.even, st.odd) {
                        if ts.abs_diff(t0) <= CPR_PAIR_WINDOW_US {
                            pos = cpr::decode_global(e, o, p.cpr.format).ok();
                        }
                    }
                }
                _ => {}
            },
            Payload::Ais(a) => {
                if let Some(AisMessage::Safety(m)) = &a.message {
                    row.label = Some(m.text.clone());
                }
            }
            Payload::Gdl90 { payload: Some(Gdl90Payload::Traffic(r) | Gdl90Payload::Ownship(r)), .. } => {
                if !r.callsign.is_empty() {
                    row.label = Some(r.callsign.clone());
                }
                row.last_altitude_ft = r.altitude_ft.or(row.last_altitude_ft);
            }
            _ => {}
        }
        if let Some((lat, lon)) = pos {
            row.last_position = Some((lat, lon));
            row.track.push((ts, lat, lon));
        }
    }
    rows.sort_by_key(|r| r.first_seen_us);
    Inventory { rows, undecoded }
}

pub fn inventory_schedule(s: &FrameSchedule) -> Inventory {
    gen_reconnaissance(s.protocol, s.entries.iter().map(|e| (e.timestamp_us, &e.frame.bits[..])))
}

/// Demodulates `iq` first; frames failing their checksum are already gone.
pub fn inventory_iq(protocol: Protocol, iq: &IqBuffer, cfg: &ModemConfig) -> Inventory {
    let frames = modem::demodulate_stream(protocol, iq, cfg);
    gen_reconnaissance(protocol, frames.iter().map(|(t, b)| (*t, &b[..])))
}
