//! Biphase-L phase modulation (±1.1 rad) for 406 MHz beacons: an unmodulated
//! carrier prefix, then Manchester-coded data at 400 bps.

use num_complex::Complex32;

use super::{IqBuffer, ModemError};
use crate::bits::Bits;

pub const DEFAULT_BITRATE: f64 = 400.0;
pub const DEFAULT_PREFIX_MS: f64 = 160.0;
pub const PHASE_DEVIATION: f32 = 1.1;

/// Samples per bit; must be an even integer so each half-bit is whole.
pub fn samples_per_bit(sample_rate: f64, bitrate: f64) -> Result<usize, ModemError> {
    let sps = sample_rate / bitrate;
    if sps < 2.0 || (sps - sps.round()).abs() > 1e-9 || !(sps.round() as usize).is_multiple_of(2) {
        return Err(ModemError::SampleRate {
            rate: sample_rate,
            reason: "biphase needs an even integer number of samples per bit",
        });
    }
    Ok(sps.round() as usize)
}

fn prefix_samples(sample_rate: f64, prefix_ms: f64) -> usize {
    (prefix_ms * sample_rate / 1000.0).round() as usize
}

/// A 1 is +1.1 rad in the first half-bit and -1.1 in the second.
pub fn biphase_modulate(
    bits: &[bool],
    sample_rate: f64,
    bitrate: f64,
    prefix_ms: f64,
    peak: f32,
) -> Result<IqBuffer, ModemError> {
    let sps = samples_per_bit(sample_rate, bitrate)?;
    let prefix = prefix_samples(sample_rate, prefix_ms);
    let mut samples = vec![Complex32::new(peak, 0.0); prefix];
    samples.reserve(bits.len() * sps);
    for &b in bits {
        let first = if b { PHASE_DEVIATION } else { -PHASE_DEVIATION };
        samples.extend(std::iter::repeat_n(Complex32::from_polar(peak, first), sps / 2));
        samples.extend(std::iter::repeat_n(Complex32::from_polar(peak, -first), sps / 2));
    }
    Ok(IqBuffer { samples, sample_rate, center_freq_label: super::center_freq(crate::Protocol::Epirb) })
}

/// Compares mean phase of the two half-bits after the prefix.
pub fn biphase_demodulate(iq: &IqBuffer, bitrate: f64, prefix_ms: f64) -> Result<Bits, ModemError> {
    let sps = samples_per_bit(iq.sample_rate, bitrate)?;
    let prefix = prefix_samples(iq.sample_rate, prefix_ms);
    let data = iq.samples.get(prefix..).unwrap_or(&[]);
    let mean_phase = |s: &[Complex32]| s.iter().map(|c| c.arg()).sum::<f32>() / s.len() as f32;
    Ok(data
        .chunks_exact(sps)
        .map(|bit| mean_phase(&bit[..sps / 2]) > mean_phase(&bit[sps / 2..]))
        .collect())
}
