//! GMSK at modulation index 0.5, as used by AIS.

use std::f64::consts::PI;

use num_complex::Complex32;

use super::{IqBuffer, ModemError};
use crate::bits::Bits;

pub const AIS_BITRATE: f64 = 9600.0;
pub const DEFAULT_BT: f64 = 0.4;
/// Gaussian filter span in bit periods.
const SPAN_BITS: usize = 4;

pub fn samples_per_bit(sample_rate: f64, bitrate: f64) -> Result<usize, ModemError> {
    let sps = sample_rate / bitrate;
    if sps < 2.0 || (sps - sps.round()).abs() > 1e-9 {
        return Err(ModemError::SampleRate {
            rate: sample_rate,
            reason: "GMSK needs an integer number (>= 2) of samples per bit",
        });
    }
    Ok(sps.round() as usize)
}

fn gaussian_taps(bt: f64, sps: usize) -> Vec<f64> {
    let n = SPAN_BITS * sps + 1;
    let c = (n - 1) as f64 / 2.0;
    // sigma in samples for a Gaussian with 3 dB bandwidth B = bt / T
    let sigma = (2f64.ln()).sqrt() / (2.0 * PI * bt) * sps as f64;
    let taps: Vec<f64> = (0..n).map(|i| (-((i as f64 - c).powi(2)) / (2.0 * sigma * sigma)).exp()).collect();
    let sum: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / sum).collect()
}

/// Frequency pulse train: NRZ symbols (1 -> +1) through the Gaussian filter.
/// Symbols beyond either end repeat the edge bit so the first and last bits
/// get their full phase swing.
fn frequency(bits: &[bool], sps: usize, bt: f64) -> Vec<f64> {
    let taps = gaussian_taps(bt, sps);
    let half = taps.len() / 2;
    let nrz = |i: isize| -> f64 {
        let k = (i.div_euclid(sps as isize)).clamp(0, bits.len() as isize - 1) as usize;
        if bits[k] {
            1.0
        } else {
            -1.0
        }
    };
    (0..bits.len() * sps)
        .map(|n| {
            taps.iter()
                .enumerate()
                .map(|(j, t)| t * nrz(n as isize + j as isize - half as isize))
                .sum()
        })
        .collect()
}

/// Exactly `bits.len() * sps` samples of constant envelope `peak`.
pub fn gmsk_modulate(bits: &[bool], sample_rate: f64, bt: f64, bitrate: f64, peak: f32) -> Result<IqBuffer, ModemError> {
    let sps = samples_per_bit(sample_rate, bitrate)?;
    let mut samples = Vec::with_capacity(bits.len() * sps);
    if !bits.is_empty() {
        // h = 0.5: each bit rotates the phase by pi/2.
        let step = PI / 2.0 / sps as f64;
        let mut phase = 0.0f64;
        for f in frequency(bits, sps, bt) {
            samples.push(Complex32::from_polar(peak, phase as f32));
            phase += step * f;
        }
    }
    Ok(IqBuffer { samples, sample_rate, center_freq_label: super::center_freq(crate::Protocol::Ais) })
}

fn phase_delta(s: &[Complex32], a: usize, b: usize) -> f32 {
    (s[b] * s[a].conj()).arg()
}

/// Quadrature discriminator. Picks the bit-clock offset with the largest
/// total phase swing, then slices the phase change across each bit.
pub fn gmsk_demodulate(iq: &IqBuffer, bitrate: f64) -> Result<Bits, ModemError> {
    let sps = samples_per_bit(iq.sample_rate, bitrate)?;
    let s = &iq.samples;
    let nbits = s.len() / sps;
    if nbits == 0 {
        return Ok(Bits::new());
    }
    let last = s.len() - 1;
    // Window for bit k at clock offset o, centred on the nominal bit centre.
    let window = |k: usize, o: isize| {
        let c = (k * sps + sps / 2) as isize + o;
        let a = (c - sps as isize / 2).clamp(0, last as isize) as usize;
        let b = (c + sps as isize / 2).clamp(0, last as isize) as usize;
        (a, b)
    };
    let spread = sps as isize / 2;
    let best = (-spread..=spread)
        .map(|o| {
            let swing: f32 = (0..nbits)
                .map(|k| {
                    let (a, b) = window(k, o);
                    phase_delta(s, a, b).abs()
                })
                .sum();
            (o, swing)
        })
        .fold((0isize, f32::MIN), |acc, x| if x.1 > acc.1 || (x.1 == acc.1 && x.0.abs() < acc.0.abs()) { x } else { acc })
        .0;
    Ok((0..nbits)
        .map(|k| {
            let (a, b) = window(k, best);
            phase_delta(s, a, b) > 0.0
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn constant_zero_rotates_with_constant_envelope() {
        let iq = gmsk_modulate(&[false; 64], 96e3, DEFAULT_BT, AIS_BITRATE, 1.0).unwrap();
        assert_eq!(iq.len(), 640);
        for w in iq.samples.windows(2) {
            assert!((w[0].norm() - 1.0).abs() < 0.01);
            // phase strictly decreasing
            assert!((w[1] * w[0].conj()).arg() < 0.0);
        }
    }

    #[test]
    fn loopback_random_payloads() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9600);
        for rate in [96e3, 192e3] {
            for _ in 0..20 {
                let bits: Bits = (0..256).map(|_| rng.gen()).collect();
                let iq = gmsk_modulate(&bits, rate, DEFAULT_BT, AIS_BITRATE, 1.0).unwrap();
                assert_eq!(gmsk_demodulate(&iq, AIS_BITRATE).unwrap(), bits);
            }
        }
    }

    #[test]
    fn phase_is_continuous() {
        let bits: Bits = (0..200).map(|i| (i * 7) % 3 == 0).collect();
        let iq = gmsk_modulate(&bits, 96e3, DEFAULT_BT, AIS_BITRATE, 1.0).unwrap();
        let max_step = iq.samples.windows(2).map(|w| (w[1] * w[0].conj()).arg().abs()).fold(0.0, f32::max);
        assert!(max_step < std::f32::consts::FRAC_PI_2, "{max_step}");
    }

    #[test]
    fn non_integer_rate_rejected() {
        assert!(gmsk_modulate(&[true], 100e3, DEFAULT_BT, AIS_BITRATE, 1.0).is_err());
    }
}
