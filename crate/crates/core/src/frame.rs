//! Protocol-tagged frames, schedules and the replay text format.
//!
//! Replay files hold one frame per line:
//!
//! ```text
//! # protocol=adsb
//! @1000000 8D4840D6202CC371C32CE0576098
//! @1500000 8D4840D6202CC371C32CE0576098 tx=1
//! @2000000 55557E8A/30
//! ```
//!
//! The optional `@<microseconds>` prefix carries the timestamp, the hex field
//! carries the bits (zero-padded to a nibble), and a `/<nbits>` suffix gives
//! the exact bit count when it is not a multiple of four. `tx=<id>` assigns the
//! frame to a transmitter. Lines starting with `#` are comments, except for the
//! `# protocol=` header.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{Bits, BitsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Adsb,
    Ais,
    Epirb,
    Gdl90,
    Ccsds,
}

impl Protocol {
    pub const ALL: [Protocol; 5] = [
        Protocol::Adsb,
        Protocol::Ais,
        Protocol::Epirb,
        Protocol::Gdl90,
        Protocol::Ccsds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Adsb => "adsb",
            Protocol::Ais => "ais",
            Protocol::Epirb => "epirb",
            Protocol::Gdl90 => "gdl90",
            Protocol::Ccsds => "ccsds",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown protocol {0:?} (expected adsb, ais, epirb, gdl90 or ccsds)")]
pub struct UnknownProtocol(pub String);

impl FromStr for Protocol {
    type Err = UnknownProtocol;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownProtocol(s.to_string()))
    }
}

/// A protocol-tagged bit-level message.
///
/// What `bits` holds depends on the protocol: the 112-bit Mode S frame for
/// ADS-B, the message payload for AIS (HDLC framing is added by the modem),
/// the 144-bit beacon message for EPIRB, the framed on-wire bytes for GDL-90
/// and the packet bytes for CCSDS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub protocol: Protocol,
    pub bits: Bits,
    pub timestamp_us: u64,
}

impl Frame {
    pub fn new(protocol: Protocol, bits: Bits, timestamp_us: u64) -> Self {
        Frame { protocol, bits, timestamp_us }
    }

    pub fn from_bytes(protocol: Protocol, bytes: &[u8], timestamp_us: u64) -> Self {
        Frame::new(protocol, Bits::from_bytes(bytes), timestamp_us)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduledFrame {
    pub timestamp_us: u64,
    pub transmitter: u32,
    pub frame: Frame,
}

/// Ordered `(timestamp, transmitter, frame)` triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameSchedule {
    pub protocol: Protocol,
    pub transmitters: u32,
    pub entries: Vec<ScheduledFrame>,
}

impl FrameSchedule {
    pub fn new(protocol: Protocol) -> Self {
        FrameSchedule { protocol, transmitters: 1, entries: Vec::new() }
    }

    pub fn push(&mut self, timestamp_us: u64, transmitter: u32, bits: Bits) {
        self.entries.push(ScheduledFrame {
            timestamp_us,
            transmitter,
            frame: Frame::new(self.protocol, bits, timestamp_us),
        });
    }

    /// Stable sort by timestamp; generators call this once before returning.
    pub fn sort(&mut self) {
        self.entries.sort_by_key(|e| e.timestamp_us);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn frames(&self) -> impl Iterator<Item = &Frame> {
        self.entries.iter().map(|e| &e.frame)
    }

    /// Checks ordering and transmitter ids.
    pub fn is_well_formed(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].timestamp_us <= w[1].timestamp_us)
            && self.entries.iter().all(|e| e.transmitter < self.transmitters)
    }

    pub fn for_transmitter(&self, tx: u32) -> FrameSchedule {
        FrameSchedule {
            protocol: self.protocol,
            transmitters: self.transmitters,
            entries: self.entries.iter().filter(|e| e.transmitter == tx).cloned().collect(),
        }
    }

    pub fn to_replay(&self) -> String {
        let mut out = format!("# protocol={}\n", self.protocol);
        for e in &self.entries {
            out.push_str(&replay_line(&e.frame.bits, Some(e.timestamp_us)));
            if e.transmitter != 0 {
                out.push_str(&format!(" tx={}", e.transmitter));
            }
            out.push('\n');
        }
        out
    }

    /// Parses replay text. `protocol` is used when the file has no header.
    pub fn from_replay(text: &str, protocol: Option<Protocol>) -> Result<Self, ReplayError> {
        let mut proto = protocol;
        let mut entries = Vec::new();
        let mut max_tx = 0u32;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(p) = rest.trim().strip_prefix("protocol=") {
                    let parsed: Protocol = p.trim().parse().map_err(|e: UnknownProtocol| {
                        ReplayError::Syntax { line: lineno + 1, msg: e.to_string() }
                    })?;
                    if let Some(given) = protocol {
                        if given != parsed {
                            return Err(ReplayError::ProtocolMismatch { file: parsed, expected: given });
                        }
                    }
                    proto = Some(parsed);
                }
                continue;
            }
            let p = proto.ok_or(ReplayError::MissingProtocol)?;
            let rec = parse_replay_line(line)
                .map_err(|msg| ReplayError::Syntax { line: lineno + 1, msg })?;
            max_tx = max_tx.max(rec.transmitter);
            let ts = rec.timestamp_us.unwrap_or(0);
            entries.push(ScheduledFrame {
                timestamp_us: ts,
                transmitter: rec.transmitter,
                frame: Frame::new(p, rec.bits, ts),
            });
        }
        Ok(FrameSchedule {
            protocol: proto.ok_or(ReplayError::MissingProtocol)?,
            transmitters: max_tx + 1,
            entries,
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("replay file has no protocol header and none was given")]
    MissingProtocol,
    #[error("replay file is {file}, expected {expected}")]
    ProtocolMismatch { file: Protocol, expected: Protocol },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayRecord {
    pub timestamp_us: Option<u64>,
    pub bits: Bits,
    pub transmitter: u32,
}

/// Renders one frame as a replay line (no trailing newline).
pub fn replay_line(bits: &Bits, timestamp_us: Option<u64>) -> String {
    let mut s = String::new();
    if let Some(ts) = timestamp_us {
        s.push_str(&format!("@{ts} "));
    }
    s.push_str(&bits.to_hex());
    if !bits.len().is_multiple_of(4) {
        s.push_str(&format!("/{}", bits.len()));
    }
    s
}

pub fn parse_replay_line(line: &str) -> Result<ReplayRecord, String> {
    let mut tokens = line.split_whitespace().peekable();
    let mut timestamp_us = None;
    if let Some(t) = tokens.peek() {
        if let Some(ts) = t.strip_prefix('@') {
            timestamp_us = Some(ts.parse::<u64>().map_err(|e| format!("bad timestamp: {e}"))?);
            tokens.next();
        }
    }
    let data = tokens.next().ok_or("missing frame data")?;
    let (hex, nbits) = match data.split_once('/') {
        Some((h, n)) => (h, Some(n.parse::<usize>().map_err(|e| format!("bad bit count: {e}"))?)),
        None => (data, None),
    };
    let bits = Bits::from_hex(hex, nbits).map_err(|e: BitsError| e.to_string())?;
    let mut transmitter = 0;
    for t in tokens {
        match t.strip_prefix("tx=") {
            Some(v) => transmitter = v.parse().map_err(|e| format!("bad transmitter: {e}"))?,
            None => return Err(format!("unexpected token {t:?}")),
        }
    }
    Ok(ReplayRecord { timestamp_us, bits, transmitter })
}
