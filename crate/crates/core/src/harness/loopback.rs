//! Transmit/receive loopback through the modems, and AIS training-sequence
//! sensitivity of a receiver model.

use serde::{Deserialize, Serialize};

use super::{HarnessError, ReceiverModel, Strictness};
use crate::ais::{self, air::build_air_frame};
use crate::attack::AirVariant;
use crate::bits::Bits;
use crate::decode::decode_any;
use crate::frame::{FrameSchedule, Protocol};
use crate::modem::{self, gmsk, biphase, ModemConfig, ModemError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameDiff {
    pub index: usize,
    pub timestamp_us: u64,
    pub expected: String,
    pub received: Option<String>,
    pub received_us: Option<u64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopbackReport {
    pub protocol: Protocol,
    pub frames: usize,
    pub recovered: usize,
    pub snr_db: Option<f64>,
    pub pass: bool,
    pub diffs: Vec<FrameDiff>,
}

impl LoopbackReport {
    pub fn recovery(&self) -> f64 {
        if self.frames == 0 {
            1.0
        } else {
            self.recovered as f64 / self.frames as f64
        }
    }
}

/// One bit period in microseconds: the timing tolerance for a match.
pub fn bit_period_us(protocol: Protocol) -> Result<f64, ModemError> {
    match protocol {
        Protocol::Adsb => Ok(1.0),
        Protocol::Ais => Ok(1e6 / gmsk::AIS_BITRATE),
        Protocol::Epirb => Ok(1e6 / biphase::DEFAULT_BITRATE),
        p => Err(ModemError::Unsupported(p)),
    }
}

/// AIS comes back padded to whole bytes with zeros.
fn same_bits(protocol: Protocol, expected: &[bool], got: &[bool]) -> bool {
    if protocol == Protocol::Ais {
        got.len() >= expected.len()
            && got.len() - expected.len() < 8
            && got[..expected.len()] == *expected
            && got[expected.len()..].iter().all(|b| !b)
    } else {
        got == expected
    }
}

/// Modulates the schedule, optionally adds white noise at `snr_db` (seeded),
/// demodulates and matches frames. A frame passes when a burst within one bit
/// period of its timestamp carries identical bits and those bits decode
/// strictly.
pub fn verify_loopback(
    schedule: &FrameSchedule,
    cfg: &ModemConfig,
    snr_db: Option<f64>,
    seed: u64,
) -> Result<LoopbackReport, HarnessError> {
    let p = schedule.protocol;
    let tol = bit_period_us(p)?;
    let mut iq = modem::modulate_schedule(schedule, cfg)?;
    if let Some(snr) = snr_db {
        modem::add_awgn(&mut iq, snr, cfg.peak, seed);
    }
    let received = modem::demodulate_stream(p, &iq, cfg);
    let mut used = vec![false; received.len()];
    let mut diffs = Vec::new();
    let mut recovered = 0;
    for (index, e) in schedule.entries.iter().enumerate() {
        let ts = e.timestamp_us;
        let near = received
            .iter()
            .enumerate()
            .filter(|(j, (t, _))| !used[*j] && (*t as f64 - ts as f64).abs() <= tol + 1e-9)
            .min_by_key(|(_, (t, _))| t.abs_diff(ts));
        let diff = |reason: &str, got: Option<&(u64, Bits)>| FrameDiff {
            index,
            timestamp_us: ts,
            expected: e.frame.bits.to_hex(),
            received: got.map(|(_, b)| b.to_hex()),
            received_us: got.map(|(t, _)| *t),
            reason: reason.into(),
        };
        let Some((j, got)) = near else {
            diffs.push(diff("not received", None));
            continue;
        };
        used[j] = true;
        if !same_bits(p, &e.frame.bits, &got.1) {
            diffs.push(diff("bits differ", Some(got)));
            continue;
        }
        let d = decode_any(p, &e.frame.bits, false);
        if !d.has_message() || d.diagnosis.integrity_failed() {
            diffs.push(diff(&format!("strict decode failed: {}", d.diagnosis), Some(got)));
            continue;
        }
        recovered += 1;
    }
    Ok(LoopbackReport { protocol: p, frames: schedule.len(), recovered, snr_db, pass: diffs.is_empty(), diffs })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreambleRow {
    pub label: String,
    pub training_bits: usize,
    pub inverted: bool,
    /// Alternating run the receiver actually sees before the start flag.
    pub measured_training: usize,
    pub decoded: bool,
}

/// Whether a measured training run is out of phase with the start flag,
/// which begins with 0: an in-phase run ends with 1.
fn out_of_phase(training: &[bool]) -> bool {
    training.last() == Some(&false)
}

/// Decode table for each AIS air-frame variant (payload from the schedule,
/// framing from the variant) under `model`.
pub fn preamble_sensitivity(
    model: &ReceiverModel,
    schedule: &FrameSchedule,
    variants: &[AirVariant],
) -> Result<Vec<PreambleRow>, HarnessError> {
    if model.protocol != Protocol::Ais || schedule.protocol != Protocol::Ais {
        return Err(HarnessError::ProtocolMismatch { model: model.protocol, input: schedule.protocol });
    }
    if variants.len() != schedule.len() {
        return Err(HarnessError::Invalid(format!(
            "{} air variants for {} schedule entries",
            variants.len(),
            schedule.len()
        )));
    }
    let lenient = model.strictness == Strictness::Lenient;
    Ok(schedule
        .entries
        .iter()
        .zip(variants)
        .map(|(e, v)| {
            let air = build_air_frame(&e.frame.bits, &v.options).to_bits();
            let d = ais::decode_air(&air, lenient);
            let locked = d.training.len() >= model.preamble_tolerance
                && (model.accept_inverted || !out_of_phase(&d.training));
            let ok = d.message.is_some() && (lenient || !d.diagnosis.integrity_failed());
            PreambleRow {
                label: v.label.clone(),
                training_bits: v.options.training.length,
                inverted: v.options.training.inverted,
                measured_training: d.training.len(),
                decoded: locked && ok,
            }
        })
        .collect())
}
