//! 1090 MHz pulse-position modulation.
//!
//! Preamble pulses start at 0, 1.0, 3.5 and 4.5 µs; data starts at 8 µs with
//! one bit per microsecond, a pulse in the first half meaning 1.

use num_complex::Complex32;

use super::{IqBuffer, ModemError};
use crate::adsb::FRAME_BITS;
use crate::bits::Bits;

pub const MIN_RATE: f64 = 2e6;
/// Preamble pulse positions in half-microsecond slots.
pub const PREAMBLE_SLOTS: [usize; 4] = [0, 2, 7, 9];
const PREAMBLE_HALF_SLOTS: usize = 16;

/// Samples per half microsecond. Requires an integer multiple of 2 Msps.
pub fn half_bit_samples(sample_rate: f64) -> Result<usize, ModemError> {
    if sample_rate < MIN_RATE {
        return Err(ModemError::SampleRate { rate: sample_rate, reason: "PPM needs at least 2 Msps" });
    }
    let h = sample_rate / MIN_RATE;
    if (h - h.round()).abs() > 1e-9 {
        return Err(ModemError::SampleRate { rate: sample_rate, reason: "PPM needs a multiple of 2 Msps" });
    }
    Ok(h.round() as usize)
}

pub fn frame_samples(nbits: usize, sample_rate: f64) -> Result<usize, ModemError> {
    Ok((PREAMBLE_HALF_SLOTS + 2 * nbits) * half_bit_samples(sample_rate)?)
}

pub fn ppm_modulate(bits: &[bool], sample_rate: f64, peak: f32) -> Result<IqBuffer, ModemError> {
    let h = half_bit_samples(sample_rate)?;
    let mut slots = vec![false; PREAMBLE_HALF_SLOTS + 2 * bits.len()];
    for s in PREAMBLE_SLOTS {
        slots[s] = true;
    }
    for (i, &b) in bits.iter().enumerate() {
        slots[PREAMBLE_HALF_SLOTS + 2 * i + usize::from(!b)] = true;
    }
    let on = Complex32::new(peak, 0.0);
    let off = Complex32::new(0.0, 0.0);
    let samples = slots.iter().flat_map(|&s| std::iter::repeat_n(if s { on } else { off }, h)).collect();
    Ok(IqBuffer { samples, sample_rate, center_freq_label: super::center_freq(crate::Protocol::Adsb) })
}

/// Detection thresholds, fixed by the 20 dB calibration run in the acceptance
/// suite (see `calibration` there).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpmDemodConfig {
    /// Weakest preamble pulse over strongest preamble gap, in magnitude.
    pub preamble_ratio: f32,
    /// Mean per-bit |a - b| / (a + b) of the half-bit energies.
    pub min_clarity: f32,
    pub nbits: usize,
}

impl Default for PpmDemodConfig {
    fn default() -> Self {
        PpmDemodConfig { preamble_ratio: 2.0, min_clarity: 0.5, nbits: FRAME_BITS }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PpmFrame {
    pub timestamp_us: u64,
    pub sample_offset: usize,
    pub bits: Bits,
    pub preamble_score: f32,
    pub clarity: f32,
}

struct Demod<'a> {
    mag: &'a [f32],
    h: usize,
}

impl Demod<'_> {
    fn slot(&self, at: usize, slot: usize) -> f32 {
        let s = at + slot * self.h;
        self.mag[s..s + self.h].iter().sum()
    }

    /// Weakest preamble pulse over strongest preamble gap. A window that is
    /// only partly aligned has noise in a pulse slot or a pulse in a gap.
    fn preamble_score(&self, at: usize) -> f32 {
        let mut pulse = f32::INFINITY;
        let mut gap = 0.0f32;
        for slot in 0..PREAMBLE_HALF_SLOTS {
            let v = self.slot(at, slot);
            if PREAMBLE_SLOTS.contains(&slot) {
                pulse = pulse.min(v);
            } else {
                gap = gap.max(v);
            }
        }
        if pulse <= 0.0 {
            0.0
        } else {
            pulse / gap.max(pulse * 1e-6)
        }
    }

    fn bits(&self, at: usize, nbits: usize) -> (Bits, f32) {
        let mut bits = Bits::with_capacity(nbits);
        let mut clarity = 0.0;
        for i in 0..nbits {
            let a = self.slot(at, PREAMBLE_HALF_SLOTS + 2 * i);
            let b = self.slot(at, PREAMBLE_HALF_SLOTS + 2 * i + 1);
            bits.push(a > b);
            if a + b > 0.0 {
                clarity += (a - b).abs() / (a + b);
            }
        }
        (bits, clarity / nbits as f32)
    }
}

/// Finds every frame whose preamble and data pass the thresholds.
pub fn ppm_demodulate(iq: &IqBuffer, cfg: &PpmDemodConfig) -> Vec<PpmFrame> {
    let Ok(h) = half_bit_samples(iq.sample_rate) else { return Vec::new() };
    let len = (PREAMBLE_HALF_SLOTS + 2 * cfg.nbits) * h;
    if iq.len() < len {
        return Vec::new();
    }
    let mag: Vec<f32> = iq.samples.iter().map(|s| s.norm()).collect();
    let d = Demod { mag: &mag, h };
    let last = iq.len() - len;
    let mut out = Vec::new();
    let mut i = 0;
    while i <= last {
        // Cheap gate: the first pulse must stand above the following gap.
        if mag[i] <= mag[i + h] || d.preamble_score(i) < cfg.preamble_ratio {
            i += 1;
            continue;
        }
        let best = (i..=(i + h).min(last))
            .max_by(|&a, &b| d.preamble_score(a).total_cmp(&d.preamble_score(b)))
            .expect("non-empty range");
        let (bits, clarity) = d.bits(best, cfg.nbits);
        if clarity < cfg.min_clarity {
            i += 1;
            continue;
        }
        out.push(PpmFrame {
            timestamp_us: (best as f64 * 1e6 / iq.sample_rate).round() as u64,
            sample_offset: best,
            bits,
            preamble_score: d.preamble_score(best),
            clarity,
        });
        i = best + len;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn preamble_indices_at_2msps() {
        let iq = ppm_modulate(&[false; 112], 2e6, 1.0).unwrap();
        let pulses: Vec<usize> = (0..16).filter(|&i| iq.samples[i].re > 0.0).collect();
        // offsets 0, 1.0, 3.5, 4.5 µs times 2 samples/µs
        let expected: Vec<usize> = [0.0, 1.0, 3.5, 4.5].iter().map(|t: &f64| (t * 2.0) as usize).collect();
        assert_eq!(pulses, expected);
        assert_eq!(iq.len(), 240);
    }

    #[test]
    fn ones_put_energy_in_first_halves() {
        let iq = ppm_modulate(&[true; 112], 4e6, 1.0).unwrap();
        for bit in 0..112 {
            let base = 32 + bit * 4;
            assert!(iq.samples[base..base + 2].iter().all(|s| s.re == 1.0));
            assert!(iq.samples[base + 2..base + 4].iter().all(|s| s.re == 0.0));
        }
        assert!(iq.samples.iter().all(|s| s.im == 0.0));
    }

    #[test]
    fn rate_restrictions() {
        assert!(ppm_modulate(&[true], 1e6, 1.0).is_err());
        assert!(ppm_modulate(&[true], 3e6, 1.0).is_err());
        assert!(ppm_modulate(&[true], 6e6, 1.0).is_ok());
    }

    #[test]
    fn silence_yields_nothing() {
        let iq = IqBuffer { samples: vec![Complex32::new(0.0, 0.0); 10_000], ..IqBuffer::new(2e6, 0.0) };
        assert!(ppm_demodulate(&iq, &PpmDemodConfig::default()).is_empty());
    }

    #[test]
    fn loopback_random_frames() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1090);
        for rate in [2e6, 4e6, 8e6] {
            for _ in 0..50 {
                let bits: Bits = (0..112).map(|_| rng.gen()).collect();
                let mut iq = IqBuffer::new(rate, 0.0);
                iq.mix_at(37, &ppm_modulate(&bits, rate, 1.0).unwrap().samples, 1.0);
                iq.samples.extend(vec![Complex32::new(0.0, 0.0); 50]);
                let got = ppm_demodulate(&iq, &PpmDemodConfig::default());
                assert_eq!(got.len(), 1);
                assert_eq!(got[0].bits, bits);
                assert_eq!(got[0].sample_offset, 37);
            }
        }
    }

    #[test]
    fn two_frames_one_ms_apart() {
        let a: Bits = (0..112).map(|i| i % 3 == 0).collect();
        let b: Bits = (0..112).map(|i| i % 5 == 0).collect();
        let mut iq = IqBuffer::new(2e6, 0.0);
        iq.mix_at(0, &ppm_modulate(&a, 2e6, 1.0).unwrap().samples, 1.0);
        iq.mix_at(2000, &ppm_modulate(&b, 2e6, 1.0).unwrap().samples, 1.0);
        let got = ppm_demodulate(&iq, &PpmDemodConfig::default());
        assert_eq!(got.len(), 2);
        assert_eq!((got[0].bits.clone(), got[1].bits.clone()), (a, b));
        assert!((got[1].timestamp_us as i64 - got[0].timestamp_us as i64 - 1000).abs() <= 1);
    }
}
