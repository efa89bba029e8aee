//! Jamming waveforms.

use std::f64::consts::TAU;

use num_complex::Complex32;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::IqBuffer;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JamKind {
    GaussianNoise,
    CwTone { offset_hz: f64 },
    /// Linear chirp from `f0_hz` to `f1_hz` over the whole duration.
    SweptTone { f0_hz: f64, f1_hz: f64 },
}

/// Deterministic given `seed`; no sample exceeds `peak`.
pub fn jam_waveform(kind: JamKind, duration_s: f64, sample_rate: f64, peak: f32, seed: u64) -> IqBuffer {
    let n = (duration_s * sample_rate).round().max(0.0) as usize;
    let samples = match kind {
        JamKind::GaussianNoise => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // sigma = peak/3 per component; the rare excursions are clipped
            let normal = Normal::new(0.0f32, peak / 3.0).expect("finite sigma");
            (0..n)
                .map(|_| {
                    let s = Complex32::new(normal.sample(&mut rng), normal.sample(&mut rng));
                    let m = s.norm();
                    if m > peak {
                        s * (peak / m * (1.0 - f32::EPSILON))
                    } else {
                        s
                    }
                })
                .collect()
        }
        JamKind::CwTone { offset_hz } => (0..n)
            .map(|i| Complex32::from_polar(peak, (TAU * offset_hz * i as f64 / sample_rate).rem_euclid(TAU) as f32))
            .collect(),
        JamKind::SweptTone { f0_hz, f1_hz } => {
            let k = if duration_s > 0.0 { (f1_hz - f0_hz) / duration_s } else { 0.0 };
            (0..n)
                .map(|i| {
                    let t = i as f64 / sample_rate;
                    let phase = TAU * (f0_hz * t + 0.5 * k * t * t);
                    Complex32::from_polar(peak, phase.rem_euclid(TAU) as f32)
                })
                .collect()
        }
    };
    IqBuffer { samples, sample_rate, center_freq_label: 0.0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cw_at_zero_offset_is_constant() {
        let b = jam_waveform(JamKind::CwTone { offset_hz: 0.0 }, 0.001, 1e6, 0.8, 0);
        assert_eq!(b.len(), 1000);
        assert!(b.samples.iter().all(|s| *s == Complex32::new(0.8, 0.0)));
    }

    #[test]
    fn noise_deterministic_and_bounded() {
        let a = jam_waveform(JamKind::GaussianNoise, 0.01, 1e6, 0.5, 7);
        assert_eq!(a, jam_waveform(JamKind::GaussianNoise, 0.01, 1e6, 0.5, 7));
        assert_ne!(a, jam_waveform(JamKind::GaussianNoise, 0.01, 1e6, 0.5, 8));
        assert!(a.peak() <= 0.5);
    }

    #[test]
    fn chirp_midpoint_frequency() {
        let (f0, f1, t, rate) = (-100e3, 300e3, 0.01, 2e6);
        let b = jam_waveform(JamKind::SweptTone { f0_hz: f0, f1_hz: f1 }, t, rate, 1.0, 0);
        let mid = b.len() / 2;
        // discrete phase difference around T/2
        let dphi = (b.samples[mid + 1] * b.samples[mid - 1].conj()).arg() as f64;
        let f = dphi / (2.0 * TAU / rate);
        assert!((f - (f0 + f1) / 2.0).abs() < 500.0, "{f}");
    }
}
