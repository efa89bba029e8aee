//! Seeded mutation fuzzer. Every record carries enough to rebuild its input
//! from the corpus, and the log line format round-trips.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fields::{self, field_map};
use super::AttackError;
use crate::bits::Bits;
use crate::ccsds::HEADER_BYTES;
use crate::frame::{replay_line, Protocol};
use crate::gdl90;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FuzzOp {
    BitFlip { positions: Vec<usize> },
    /// XOR `mask` into the byte at `offset`.
    ByteFlip { offset: usize, mask: u8 },
    /// Keep the first `len` bits.
    Truncate { len: usize },
    Extend { bytes: Vec<u8> },
    /// Write `value` into a named field.
    FieldAware { field: String, offset: usize, width: usize, value: u64 },
    /// Input up to bit `at`, then corpus entry `donor` from bit `donor_at`.
    Splice { donor: usize, at: usize, donor_at: usize },
    /// Insert `times` extra copies of bits `start..start + len`.
    Repeat { start: usize, len: usize, times: usize },
}

impl FuzzOp {
    pub fn name(&self) -> &'static str {
        match self {
            FuzzOp::BitFlip { .. } => "bit_flip",
            FuzzOp::ByteFlip { .. } => "byte_flip",
            FuzzOp::Truncate { .. } => "truncate",
            FuzzOp::Extend { .. } => "extend",
            FuzzOp::FieldAware { .. } => "field",
            FuzzOp::Splice { .. } => "splice",
            FuzzOp::Repeat { .. } => "repeat",
        }
    }

    fn params(&self) -> String {
        match self {
            FuzzOp::BitFlip { positions } => {
                format!("positions={}", positions.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","))
            }
            FuzzOp::ByteFlip { offset, mask } => format!("offset={offset} mask=0x{mask:02X}"),
            FuzzOp::Truncate { len } => format!("len={len}"),
            FuzzOp::Extend { bytes } => format!("bytes={}", hex::encode_upper(bytes)),
            FuzzOp::FieldAware { field, offset, width, value } => {
                format!("field={field} offset={offset} width={width} value=0x{value:X}")
            }
            FuzzOp::Splice { donor, at, donor_at } => format!("donor={donor} at={at} donor_at={donor_at}"),
            FuzzOp::Repeat { start, len, times } => format!("start={start} len={len} times={times}"),
        }
    }

    fn parse(name: &str, p: &BTreeMap<String, String>) -> Result<Self, String> {
        let get = |k: &str| p.get(k).ok_or_else(|| format!("missing {k}"));
        let num = |k: &str| -> Result<usize, String> { get(k)?.parse().map_err(|e| format!("{k}: {e}")) };
        let hexnum = |k: &str| -> Result<u64, String> {
            let v = get(k)?;
            u64::from_str_radix(v.trim_start_matches("0x"), 16).map_err(|e| format!("{k}: {e}"))
        };
        Ok(match name {
            "bit_flip" => FuzzOp::BitFlip {
                positions: get("positions")?
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse().map_err(|e| format!("positions: {e}")))
                    .collect::<Result<_, _>>()?,
            },
            "byte_flip" => FuzzOp::ByteFlip { offset: num("offset")?, mask: hexnum("mask")? as u8 },
            "truncate" => FuzzOp::Truncate { len: num("len")? },
            "extend" => FuzzOp::Extend { bytes: hex::decode(get("bytes")?).map_err(|e| e.to_string())? },
            "field" => FuzzOp::FieldAware {
                field: get("field")?.clone(),
                offset: num("offset")?,
                width: num("width")?,
                value: hexnum("value")?,
            },
            "splice" => FuzzOp::Splice { donor: num("donor")?, at: num("at")?, donor_at: num("donor_at")? },
            "repeat" => FuzzOp::Repeat { start: num("start")?, len: num("len")?, times: num("times")? },
            other => return Err(format!("unknown op {other:?}")),
        })
    }
}

/// Where a mutation was applied. `Framing` exists only for GDL-90, where
/// message-layer mutations get a valid CRC from the framer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Message,
    Framing,
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layer::Message => "message",
            Layer::Framing => "framing",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzRecord {
    pub iteration: u64,
    /// Corpus index of the base input.
    pub source: usize,
    pub op: FuzzOp,
    /// Checksums / length field recomputed after mutation.
    pub fix: bool,
    pub layer: Layer,
    /// Bits as placed in the schedule.
    pub input: Bits,
}

impl FuzzRecord {
    /// `iteration<TAB>op<TAB>params<TAB>hex`.
    pub fn log_line(&self) -> String {
        format!(
            "{}\t{}\tsrc={} layer={} fix={} {}\t{}",
            self.iteration,
            self.op.name(),
            self.source,
            self.layer,
            u8::from(self.fix),
            self.op.params(),
            replay_line(&self.input, None)
        )
    }

    pub fn parse_log_line(line: &str) -> Result<FuzzRecord, String> {
        let cols: Vec<&str> = line.trim_end_matches(['\r', '\n']).split('\t').collect();
        let [iter, op, params, hex] = cols[..] else {
            return Err(format!("expected 4 tab-separated columns, got {}", cols.len()));
        };
        let p: BTreeMap<String, String> = params
            .split_whitespace()
            .filter_map(|kv| kv.split_once('='))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let (hex, nbits) = match hex.split_once('/') {
            Some((h, n)) => (h, Some(n.parse::<usize>().map_err(|e| format!("bit count: {e}"))?)),
            None => (hex, None),
        };
        Ok(FuzzRecord {
            iteration: iter.parse().map_err(|e| format!("iteration: {e}"))?,
            source: p.get("src").ok_or("missing src")?.parse().map_err(|e| format!("src: {e}"))?,
            fix: p.get("fix").map(|v| v == "1").ok_or("missing fix")?,
            layer: match p.get("layer").map(String::as_str) {
                Some("message") => Layer::Message,
                Some("framing") => Layer::Framing,
                other => return Err(format!("bad layer {other:?}")),
            },
            op: FuzzOp::parse(op, &p)?,
            input: Bits::from_hex(hex, nbits).map_err(|e| e.to_string())?,
        })
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn byte_oriented(p: Protocol) -> bool {
    matches!(p, Protocol::Gdl90 | Protocol::Ccsds)
}

/// Corpus entries for GDL-90 are unframed message bytes; everything else is
/// in schedule form.
fn frame_for_schedule(p: Protocol, bits: &Bits) -> Bits {
    if p == Protocol::Gdl90 {
        Bits::from_bytes(&gdl90::frame_bytes(&bits.to_bytes()))
    } else {
        bits.clone()
    }
}

fn draw_op(rng: &mut ChaCha8Rng, protocol: Protocol, base: &Bits, corpus_len: usize, layer: Layer) -> FuzzOp {
    let n = base.len();
    let byte = byte_oriented(protocol);
    let fields: Vec<_> = if layer == Layer::Message {
        field_map(protocol).iter().filter(|f| f.fits(base)).collect()
    } else {
        Vec::new()
    };
    loop {
        match rng.gen_range(0..7) {
            0 if n > 0 => {
                let k = rng.gen_range(1..=n.min(4));
                let mut positions = index::sample(rng, n, k).into_vec();
                positions.sort_unstable();
                return FuzzOp::BitFlip { positions };
            }
            1 if n >= 8 => {
                return FuzzOp::ByteFlip { offset: rng.gen_range(0..n / 8), mask: rng.gen_range(1..=255) };
            }
            2 if n > 0 => {
                let len = if byte { rng.gen_range(0..n / 8) * 8 } else { rng.gen_range(0..n) };
                return FuzzOp::Truncate { len };
            }
            3 => {
                let k = rng.gen_range(1..=16);
                return FuzzOp::Extend { bytes: (0..k).map(|_| rng.gen()).collect() };
            }
            4 if !fields.is_empty() => {
                let f = fields[rng.gen_range(0..fields.len())];
                let value = match rng.gen_range(0..4) {
                    0 => 0,
                    1 => f.max(),
                    2 => f.max() / 2 + 1,
                    _ => rng.gen::<u64>() & f.max(),
                };
                return FuzzOp::FieldAware { field: f.name.into(), offset: f.offset, width: f.width, value };
            }
            5 if corpus_len > 1 && n > 0 => {
                let donor = rng.gen_range(0..corpus_len);
                let (at, donor_at) = if byte {
                    (rng.gen_range(0..=n / 8) * 8, rng.gen_range(0..=n / 8) * 8)
                } else {
                    (rng.gen_range(0..=n), rng.gen_range(0..=n))
                };
                return FuzzOp::Splice { donor, at, donor_at };
            }
            6 if n >= 8 => {
                let unit = if byte { 8 } else { 1 };
                let start = rng.gen_range(0..n / unit) * unit;
                let len = (rng.gen_range(1..=(n - start) / unit).min(8)) * unit;
                return FuzzOp::Repeat { start, len, times: rng.gen_range(1..=4) };
            }
            _ => {}
        }
    }
}

fn apply_op(op: &FuzzOp, base: &Bits, corpus: &[Bits]) -> Result<Bits, AttackError> {
    let mut b = base.clone();
    match op {
        FuzzOp::BitFlip { positions } => {
            for &p in positions {
                if p < b.len() {
                    b[p] = !b[p];
                }
            }
        }
        FuzzOp::ByteFlip { offset, mask } => {
            for i in 0..8 {
                let p = offset * 8 + i;
                if p < b.len() && mask >> (7 - i) & 1 == 1 {
                    b[p] = !b[p];
                }
            }
        }
        FuzzOp::Truncate { len } => b.truncate(*len),
        FuzzOp::Extend { bytes } => b.push_bits(&Bits::from_bytes(bytes)),
        FuzzOp::FieldAware { offset, width, value, .. } => {
            if offset + width <= b.len() {
                b.set_uint(*offset, *width, *value);
            }
        }
        FuzzOp::Splice { donor, at, donor_at } => {
            let d = corpus.get(*donor).ok_or(AttackError::EmptyCorpus)?;
            let cut = (*at).min(b.len());
            b.truncate(cut);
            b.push_bits(&d[(*donor_at).min(d.len())..]);
        }
        FuzzOp::Repeat { start, len, times } => {
            let end = (start + len).min(b.len());
            let seg: Vec<bool> = b[(*start).min(end)..end].to_vec();
            let tail: Vec<bool> = b[end..].to_vec();
            b.truncate(end);
            for _ in 0..*times {
                b.push_bits(&seg);
            }
            b.push_bits(&tail);
        }
    }
    Ok(b)
}

fn fix(protocol: Protocol, bits: &mut Bits) {
    match protocol {
        Protocol::Ccsds if bits.len() >= HEADER_BYTES * 8 => {
            let payload = (bits.len() / 8).saturating_sub(HEADER_BYTES);
            bits.set_uint(32, 16, payload.saturating_sub(1).min(0xFFFF) as u64);
        }
        p => fields::fix_integrity(p, bits, &|_| false),
    }
}

fn build(protocol: Protocol, corpus: &[Bits], source: usize, op: &FuzzOp, fixed: bool, layer: Layer) -> Result<Bits, AttackError> {
    let base = corpus.get(source).ok_or(AttackError::EmptyCorpus)?;
    match layer {
        Layer::Framing => {
            let framed: Vec<Bits> = corpus.iter().map(|c| frame_for_schedule(protocol, c)).collect();
            apply_op(op, &framed[source], &framed)
        }
        Layer::Message => {
            let mut b = apply_op(op, base, corpus)?;
            if fixed {
                fix(protocol, &mut b);
            }
            Ok(frame_for_schedule(protocol, &b))
        }
    }
}

/// Runs `iterations` mutations over `corpus`. Iteration `i` draws from its
/// own stream so any single record can be regenerated in isolation.
pub fn fuzz(corpus: &[Bits], protocol: Protocol, iterations: u64, seed: u64) -> Result<Vec<FuzzRecord>, AttackError> {
    if corpus.is_empty() {
        return Err(AttackError::EmptyCorpus);
    }
    (0..iterations)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ splitmix64(i));
            let source = rng.gen_range(0..corpus.len());
            let layer = if protocol == Protocol::Gdl90 && rng.gen_bool(0.2) { Layer::Framing } else { Layer::Message };
            let fixed = layer == Layer::Message && rng.gen_bool(0.5);
            let base = match layer {
                Layer::Message => corpus[source].clone(),
                Layer::Framing => frame_for_schedule(protocol, &corpus[source]),
            };
            let op = draw_op(&mut rng, protocol, &base, corpus.len(), layer);
            let input = build(protocol, corpus, source, &op, fixed, layer)?;
            Ok(FuzzRecord { iteration: i, source, op, fix: fixed, layer, input })
        })
        .collect()
}

/// Rebuilds a record's input from the corpus.
pub fn replay(corpus: &[Bits], protocol: Protocol, record: &FuzzRecord) -> Result<Bits, AttackError> {
    if corpus.is_empty() {
        return Err(AttackError::EmptyCorpus);
    }
    build(protocol, corpus, record.source, &record.op, record.fix, record.layer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adsb::{encode_identification, ModeSFrame};
    use proptest::prelude::*;

    fn corpus() -> Vec<Bits> {
        vec![
            ModeSFrame::from_hex("8D4840D6202CC371C32CE0576098").unwrap().to_bits(),
            encode_identification(0xABCDEF, "TEST1").unwrap().to_bits(),
        ]
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(fuzz(&[], Protocol::Adsb, 3, 0), Err(AttackError::EmptyCorpus)));
    }

    #[test]
    fn log_lines_round_trip() {
        for p in [Protocol::Adsb, Protocol::Gdl90] {
            let c = if p == Protocol::Gdl90 {
                vec![Bits::from_bytes(&[0x14, 1, 2, 3, 4, 5])]
            } else {
                corpus()
            };
            for r in fuzz(&c, p, 200, 9).unwrap() {
                assert_eq!(FuzzRecord::parse_log_line(&r.log_line()).unwrap(), r);
            }
        }
    }

    #[test]
    fn gdl90_uses_both_layers() {
        let c = vec![Bits::from_bytes(&[0x14, 1, 2, 3, 4, 5])];
        let recs = fuzz(&c, Protocol::Gdl90, 300, 1).unwrap();
        let framing = recs.iter().filter(|r| r.layer == Layer::Framing).count();
        assert!(framing > 20 && framing < 100, "{framing}");
    }

    proptest! {
        #[test]
        fn deterministic_and_replayable(seed in any::<u64>(), n in 1u64..40) {
            let c = corpus();
            let a = fuzz(&c, Protocol::Adsb, n, seed).unwrap();
            prop_assert_eq!(&a, &fuzz(&c, Protocol::Adsb, n, seed).unwrap());
            for r in &a {
                prop_assert_eq!(&replay(&c, Protocol::Adsb, r).unwrap(), &r.input);
            }
        }

        #[test]
        fn prefix_stable(seed in any::<u64>()) {
            let c = corpus();
            let long = fuzz(&c, Protocol::Adsb, 30, seed).unwrap();
            let short = fuzz(&c, Protocol::Adsb, 10, seed).unwrap();
            prop_assert_eq!(&long[..10], &short[..]);
        }
    }
}
