//! AIVDM sentences.
//!
//! `!AIVDM,<total>,<number>,<seq>,<channel>,<payload>,<fill>*<checksum>`, with
//! the checksum being the XOR of every byte between `!` and `*`. Payloads longer
//! than 62 armored characters are split into 60-character fragments.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::sixbit::{armor_6bit, dearmor_6bit, ArmorError};
use super::{decode_message, AisDecoded, AisMessage};

pub const MAX_SINGLE_PAYLOAD: usize = 62;
pub const FRAGMENT_PAYLOAD: usize = 60;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NmeaError {
    #[error("sentence does not start with '!' or '$'")]
    NoStart,
    #[error("missing checksum")]
    NoChecksum,
    #[error("checksum mismatch: computed {computed:02X}, sentence says {stated}")]
    Checksum { computed: u8, stated: String },
    #[error("expected 7 fields, found {0}")]
    FieldCount(usize),
    #[error("bad field {0}")]
    BadField(&'static str),
    #[error("fragment {got} out of order (expected {expected})")]
    FragmentOrder { expected: u8, got: u8 },
    #[error("incomplete multi-part message")]
    Incomplete,
    #[error(transparent)]
    Armor(#[from] ArmorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    A,
    B,
}

impl Channel {
    pub fn letter(self) -> char {
        match self {
            Channel::A => 'A',
            Channel::B => 'B',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AivdmSentence {
    pub talker: String,
    pub total: u8,
    pub number: u8,
    pub seq_id: Option<u8>,
    pub channel: Option<char>,
    pub payload: String,
    pub fill: u8,
}

pub fn checksum(body: &str) -> u8 {
    body.bytes().fold(0, |acc, b| acc ^ b)
}

impl AivdmSentence {
    fn body(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.talker,
            self.total,
            self.number,
            self.seq_id.map(|s| s.to_string()).unwrap_or_default(),
            self.channel.map(String::from).unwrap_or_default(),
            self.payload,
            self.fill
        )
    }
}

impl fmt::Display for AivdmSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = self.body();
        write!(f, "!{}*{:02X}", body, checksum(&body))
    }
}

impl FromStr for AivdmSentence {
    type Err = NmeaError;

    fn from_str(line: &str) -> Result<Self, NmeaError> {
        let line = line.trim_end_matches(['\r', '\n']);
        let rest = line.strip_prefix('!').or_else(|| line.strip_prefix('$')).ok_or(NmeaError::NoStart)?;
        let (body, cs) = rest.rsplit_once('*').ok_or(NmeaError::NoChecksum)?;
        let computed = checksum(body);
        if u8::from_str_radix(cs, 16).ok() != Some(computed) || cs.len() != 2 {
            return Err(NmeaError::Checksum { computed, stated: cs.to_string() });
        }
        let fields: Vec<&str> = body.split(',').collect();
        if fields.len() != 7 {
            return Err(NmeaError::FieldCount(fields.len()));
        }
        let num = |s: &str, name| s.parse::<u8>().map_err(|_| NmeaError::BadField(name));
        let seq_id = if fields[3].is_empty() { None } else { Some(num(fields[3], "sequence id")?) };
        let channel = match fields[4] {
            "" => None,
            c if c.chars().count() == 1 => c.chars().next(),
            _ => return Err(NmeaError::BadField("channel")),
        };
        let s = AivdmSentence {
            talker: fields[0].to_string(),
            total: num(fields[1], "fragment count")?,
            number: num(fields[2], "fragment number")?,
            seq_id,
            channel,
            payload: fields[5].to_string(),
            fill: num(fields[6], "fill bits")?,
        };
        if s.total == 0 || s.number == 0 || s.number > s.total {
            return Err(NmeaError::BadField("fragment number"));
        }
        Ok(s)
    }
}

/// Sentences for `message`. `seq_id` is only emitted for multi-part output.
pub fn build_aivdm_sentences(message: &AisMessage, channel: Channel, seq_id: u8) -> Vec<AivdmSentence> {
    let (payload, fill) = armor_6bit(&message.to_bits());
    build_from_payload(&payload, fill, channel, seq_id)
}

pub fn build_from_payload(payload: &str, fill: u8, channel: Channel, seq_id: u8) -> Vec<AivdmSentence> {
    if payload.len() <= MAX_SINGLE_PAYLOAD {
        return vec![AivdmSentence {
            talker: "AIVDM".into(),
            total: 1,
            number: 1,
            seq_id: None,
            channel: Some(channel.letter()),
            payload: payload.to_string(),
            fill,
        }];
    }
    let chunks: Vec<&str> = payload
        .as_bytes()
        .chunks(FRAGMENT_PAYLOAD)
        .map(|c| std::str::from_utf8(c).expect("armored payload is ASCII"))
        .collect();
    let total = chunks.len() as u8;
    chunks
        .into_iter()
        .enumerate()
        .map(|(i, chunk)| AivdmSentence {
            talker: "AIVDM".into(),
            total,
            number: i as u8 + 1,
            seq_id: Some(seq_id % 10),
            channel: Some(channel.letter()),
            payload: chunk.to_string(),
            fill: if i as u8 + 1 == total { fill } else { 0 },
        })
        .collect()
}

/// Reassembles fragments and decodes every complete message in `lines`.
pub fn decode_aivdm<'a>(lines: impl IntoIterator<Item = &'a str>) -> Result<Vec<AisDecoded>, NmeaError> {
    let mut out = Vec::new();
    let mut pending: Vec<AivdmSentence> = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let s: AivdmSentence = line.trim().parse()?;
        let expected = pending.len() as u8 + 1;
        if s.number != expected {
            return Err(NmeaError::FragmentOrder { expected, got: s.number });
        }
        let done = s.number == s.total;
        pending.push(s);
        if done {
            let payload: String = pending.iter().map(|p| p.payload.as_str()).collect();
            let fill = pending.last().map(|p| p.fill).unwrap_or(0);
            let bits = dearmor_6bit(&payload, fill)?;
            out.push(decode_message(&bits));
            pending.clear();
        }
    }
    if !pending.is_empty() {
        return Err(NmeaError::Incomplete);
    }
    Ok(out)
}
