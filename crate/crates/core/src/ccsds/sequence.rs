//! Packet sequences built from a template and a list of mutations, and their
//! binary capture format.

use std::fmt;
use std::io::{self, Read, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{encode_unchecked, SpacePacket, MAX_PAYLOAD, MAX_SEQ_COUNT};
use crate::bits::Bits;
use crate::frame::{FrameSchedule, Protocol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// `n` identical copies of the template.
    Replay(u32),
    /// Template with a sequence-count discontinuity.
    SeqJump,
    /// Extra bytes beyond what the length field declares.
    LengthMismatch,
    /// Maximum-size payload.
    Oversize,
    /// `n` packets with consecutive sequence counts and no spacing.
    Flood(u32),
    /// Non-zero version number.
    BadVersion,
    /// Payload cut short of the declared length.
    Truncate,
    /// Template header with random payload of the same length.
    RandomPayload,
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mutation::Replay(n) => write!(f, "replay*{n}"),
            Mutation::SeqJump => f.write_str("seq_jump"),
            Mutation::LengthMismatch => f.write_str("length_mismatch"),
            Mutation::Oversize => f.write_str("oversize"),
            Mutation::Flood(n) => write!(f, "flood*{n}"),
            Mutation::BadVersion => f.write_str("bad_version"),
            Mutation::Truncate => f.write_str("truncate"),
            Mutation::RandomPayload => f.write_str("random_payload"),
        }
    }
}

impl FromStr for Mutation {
    type Err = String;

    /// Accepts `name`, `name*n`, `name×n` or `name:n`.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().to_ascii_lowercase().replace(['×', ':'], "*");
        let (name, count) = match s.split_once('*') {
            Some((n, c)) => (n.to_string(), Some(c.parse::<u32>().map_err(|e| format!("{s}: {e}"))?)),
            None => (s.clone(), None),
        };
        Ok(match name.as_str() {
            "replay" => Mutation::Replay(count.unwrap_or(1)),
            "flood" => Mutation::Flood(count.unwrap_or(100)),
            "seq_jump" => Mutation::SeqJump,
            "length_mismatch" => Mutation::LengthMismatch,
            "oversize" => Mutation::Oversize,
            "bad_version" => Mutation::BadVersion,
            "truncate" => Mutation::Truncate,
            "random_payload" => Mutation::RandomPayload,
            _ => return Err(format!("unknown mutation {s:?}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntryContent {
    Packet(SpacePacket),
    /// Malformed by design.
    Raw(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceEntry {
    pub delay_ms: u64,
    pub content: EntryContent,
}

impl SequenceEntry {
    pub fn bytes(&self) -> Vec<u8> {
        match &self.content {
            EntryContent::Packet(p) => encode_unchecked(p),
            EntryContent::Raw(b) => b.clone(),
        }
    }

    pub fn is_well_formed(&self) -> bool {
        matches!(self.content, EntryContent::Packet(_))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PacketSequence {
    pub entries: Vec<SequenceEntry>,
}

/// Spacing between packets unless a mutation says otherwise.
pub const DEFAULT_DELAY_MS: u64 = 100;

pub fn build_dos_sequence(template: &SpacePacket, mutations: &[Mutation], seed: u64) -> PacketSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    let push = |entries: &mut Vec<SequenceEntry>, content, delay| {
        let delay_ms = if entries.is_empty() { 0 } else { delay };
        entries.push(SequenceEntry { delay_ms, content });
    };
    if mutations.is_empty() {
        push(&mut entries, EntryContent::Packet(template.clone()), 0);
    }
    for m in mutations {
        match *m {
            Mutation::Replay(n) => {
                for _ in 0..n {
                    push(&mut entries, EntryContent::Packet(template.clone()), DEFAULT_DELAY_MS);
                }
            }
            Mutation::SeqJump => {
                let jump = rng.gen_range(2..=MAX_SEQ_COUNT);
                let p = SpacePacket { seq_count: (template.seq_count + jump) & MAX_SEQ_COUNT, ..template.clone() };
                push(&mut entries, EntryContent::Packet(p), DEFAULT_DELAY_MS);
            }
            Mutation::LengthMismatch => {
                let mut b = encode_unchecked(template);
                let extra = rng.gen_range(1..=16);
                b.extend((0..extra).map(|_| rng.gen::<u8>()));
                push(&mut entries, EntryContent::Raw(b), DEFAULT_DELAY_MS);
            }
            Mutation::Oversize => {
                let payload: Vec<u8> = (0..MAX_PAYLOAD).map(|_| rng.gen()).collect();
                push(&mut entries, EntryContent::Packet(SpacePacket { payload, ..template.clone() }), DEFAULT_DELAY_MS);
            }
            Mutation::Flood(n) => {
                for i in 0..n {
                    let seq_count = (template.seq_count as u32 + i) as u16 & MAX_SEQ_COUNT;
                    push(&mut entries, EntryContent::Packet(SpacePacket { seq_count, ..template.clone() }), 0);
                }
            }
            Mutation::BadVersion => {
                let p = SpacePacket { version: rng.gen_range(1..=7), ..template.clone() };
                push(&mut entries, EntryContent::Raw(encode_unchecked(&p)), DEFAULT_DELAY_MS);
            }
            Mutation::Truncate => {
                let b = encode_unchecked(template);
                let keep = super::HEADER_BYTES + template.payload.len() / 2;
                let keep = if keep == b.len() { keep - 1 } else { keep };
                push(&mut entries, EntryContent::Raw(b[..keep].to_vec()), DEFAULT_DELAY_MS);
            }
            Mutation::RandomPayload => {
                let payload = (0..template.payload.len()).map(|_| rng.gen()).collect();
                push(&mut entries, EntryContent::Packet(SpacePacket { payload, ..template.clone() }), DEFAULT_DELAY_MS);
            }
        }
    }
    PacketSequence { entries }
}

impl PacketSequence {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Cumulative send offsets in microseconds.
    pub fn offsets_us(&self) -> Vec<u64> {
        self.entries
            .iter()
            .scan(0u64, |t, e| {
                *t += e.delay_ms * 1000;
                Some(*t)
            })
            .collect()
    }

    pub fn to_schedule(&self) -> FrameSchedule {
        let mut s = FrameSchedule::new(Protocol::Ccsds);
        for (e, t) in self.entries.iter().zip(self.offsets_us()) {
            s.push(t, 0, Bits::from_bytes(&e.bytes()));
        }
        s
    }

    /// Capture records: u64 LE offset (µs), u32 LE length, bytes.
    pub fn write_capture<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (e, t) in self.entries.iter().zip(self.offsets_us()) {
            let b = e.bytes();
            w.write_all(&t.to_le_bytes())?;
            w.write_all(&(b.len() as u32).to_le_bytes())?;
            w.write_all(&b)?;
        }
        w.flush()
    }
}

pub fn read_capture<R: Read>(mut r: R) -> io::Result<Vec<(u64, Vec<u8>)>> {
    let mut out = Vec::new();
    let mut head = [0u8; 12];
    loop {
        match r.read_exact(&mut head) {
            Ok(()) => {}
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => break,
            Err(e) => return Err(e),
        }
        let t = u64::from_le_bytes(head[..8].try_into().expect("8 bytes"));
        let n = u32::from_le_bytes(head[8..].try_into().expect("4 bytes")) as usize;
        let mut b = vec![0u8; n];
        r.read_exact(&mut b)?;
        out.push((t, b));
    }
    Ok(out)
}
