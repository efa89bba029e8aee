//! Baseband IQ synthesis and recovery. No RF is produced; IQ files are the
//! interface to the outside world.

pub mod biphase;
pub mod gmsk;
pub mod iq;
pub mod jam;
pub mod ppm;

use num_complex::Complex32;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::ais::air::{self, AirFrameOptions};
use crate::bits::Bits;
use crate::frame::{FrameSchedule, Protocol};

pub use iq::{iq_read, iq_write, IqFormat};
pub use jam::{jam_waveform, JamKind};

#[derive(Debug, Error)]
pub enum ModemError {
    #[error("sample rate {rate} Hz: {reason}")]
    SampleRate { rate: f64, reason: &'static str },
    #[error("{0} has no baseband waveform")]
    Unsupported(Protocol),
    #[error("IQ format: {0}")]
    Format(String),
    #[error("metadata: {0}")]
    Meta(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IqBuffer {
    pub samples: Vec<Complex32>,
    pub sample_rate: f64,
    /// Metadata only.
    pub center_freq_label: f64,
}

impl IqBuffer {
    pub fn new(sample_rate: f64, center_freq_label: f64) -> Self {
        IqBuffer { samples: Vec::new(), sample_rate, center_freq_label }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn peak(&self) -> f32 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f32::max)
    }

    /// Adds `other` starting at sample `at`, growing as needed, then clips
    /// every touched sample to `peak`.
    pub fn mix_at(&mut self, at: usize, other: &[Complex32], peak: f32) {
        if self.samples.len() < at + other.len() {
            self.samples.resize(at + other.len(), Complex32::new(0.0, 0.0));
        }
        for (d, s) in self.samples[at..].iter_mut().zip(other) {
            *d += s;
            let n = d.norm();
            if n > peak {
                *d *= peak / n * (1.0 - f32::EPSILON);
            }
        }
    }
}

/// Complex AWGN. SNR is peak signal power over total noise variance.
pub fn add_awgn(buf: &mut IqBuffer, snr_db: f64, peak: f32, seed: u64) {
    let var = (peak as f64).powi(2) / 10f64.powf(snr_db / 10.0);
    let normal = Normal::new(0.0, (var / 2.0).sqrt()).expect("finite sigma");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in &mut buf.samples {
        s.re += normal.sample(&mut rng) as f32;
        s.im += normal.sample(&mut rng) as f32;
    }
}

pub fn center_freq(protocol: Protocol) -> f64 {
    match protocol {
        Protocol::Adsb => 1_090e6,
        Protocol::Ais => 161.975e6,
        Protocol::Epirb => 406.04e6,
        Protocol::Gdl90 | Protocol::Ccsds => 0.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModemConfig {
    pub ppm_rate: f64,
    pub gmsk_rate: f64,
    pub biphase_rate: f64,
    pub peak: f32,
    pub ais_air: AirFrameOptions,
    pub biphase_prefix_ms: f64,
}

impl Default for ModemConfig {
    fn default() -> Self {
        ModemConfig {
            ppm_rate: 2e6,
            gmsk_rate: 96e3,
            biphase_rate: 48e3,
            peak: 1.0,
            ais_air: AirFrameOptions::default(),
            biphase_prefix_ms: biphase::DEFAULT_PREFIX_MS,
        }
    }
}

impl ModemConfig {
    pub fn sample_rate(&self, protocol: Protocol) -> Result<f64, ModemError> {
        match protocol {
            Protocol::Adsb => Ok(self.ppm_rate),
            Protocol::Ais => Ok(self.gmsk_rate),
            Protocol::Epirb => Ok(self.biphase_rate),
            p => Err(ModemError::Unsupported(p)),
        }
    }
}

/// Baseband waveform for one frame. AIS payloads are HDLC-framed and NRZI
/// coded first.
pub fn burst(protocol: Protocol, bits: &[bool], cfg: &ModemConfig) -> Result<Vec<Complex32>, ModemError> {
    let buf = match protocol {
        Protocol::Adsb => ppm::ppm_modulate(bits, cfg.ppm_rate, cfg.peak)?,
        Protocol::Ais => {
            let line = air::nrzi_encode(&air::build_air_frame(bits, &cfg.ais_air).to_bits());
            gmsk::gmsk_modulate(&line, cfg.gmsk_rate, gmsk::DEFAULT_BT, gmsk::AIS_BITRATE, cfg.peak)?
        }
        Protocol::Epirb => biphase::biphase_modulate(
            bits,
            cfg.biphase_rate,
            biphase::DEFAULT_BITRATE,
            cfg.biphase_prefix_ms,
            cfg.peak,
        )?,
        p => return Err(ModemError::Unsupported(p)),
    };
    Ok(buf.samples)
}

/// Places every scheduled frame at its timestamp in one buffer.
pub fn modulate_schedule(schedule: &FrameSchedule, cfg: &ModemConfig) -> Result<IqBuffer, ModemError> {
    let rate = cfg.sample_rate(schedule.protocol)?;
    let mut buf = IqBuffer::new(rate, center_freq(schedule.protocol));
    for e in &schedule.entries {
        let at = (e.timestamp_us as f64 * rate / 1e6).round() as usize;
        buf.mix_at(at, &burst(schedule.protocol, &e.frame.bits, cfg)?, cfg.peak);
    }
    Ok(buf)
}

/// Sample ranges where the envelope stays above half of `peak`, bridging dips
/// shorter than `bridge` samples.
pub fn find_bursts(samples: &[Complex32], peak: f32, bridge: usize) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    let level = peak * 0.5;
    let mut start = None;
    for (i, s) in samples.iter().enumerate() {
        let on = s.norm() > level;
        match (on, start) {
            (true, None) => start = Some(i),
            (false, Some(st)) => {
                out.push((st, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(st) = start {
        out.push((st, samples.len()));
    }
    let mut merged: Vec<(usize, usize)> = Vec::new();
    for r in out {
        match merged.last_mut() {
            Some(last) if r.0 - last.1 < bridge => last.1 = r.1,
            _ => merged.push(r),
        }
    }
    merged
}

/// Recovers frames from a buffer: ADS-B by preamble search, AIS and EPIRB by
/// burst segmentation. Returns (timestamp µs, bits); AIS bits are the payload
/// inside the HDLC frame, so CRC-failed bursts are dropped.
pub fn demodulate_stream(protocol: Protocol, buf: &IqBuffer, cfg: &ModemConfig) -> Vec<(u64, Bits)> {
    let to_us = |i: usize| (i as f64 * 1e6 / buf.sample_rate).round() as u64;
    match protocol {
        Protocol::Adsb => ppm::ppm_demodulate(buf, &ppm::PpmDemodConfig::default())
            .into_iter()
            .map(|f| (f.timestamp_us, f.bits))
            .collect(),
        Protocol::Ais => {
            let Ok(sps) = gmsk::samples_per_bit(buf.sample_rate, gmsk::AIS_BITRATE) else { return Vec::new() };
            find_bursts(&buf.samples, cfg.peak, sps * 4)
                .into_iter()
                .filter_map(|(a, b)| {
                    let part = IqBuffer { samples: buf.samples[a..b].to_vec(), ..buf.clone() };
                    let line = gmsk::gmsk_demodulate(&part, gmsk::AIS_BITRATE).ok()?;
                    let d = air::deframe(&air::nrzi_decode(&line), false);
                    Some((to_us(a), d.data?))
                })
                .collect()
        }
        Protocol::Epirb => {
            let Ok(sps) = biphase::samples_per_bit(buf.sample_rate, biphase::DEFAULT_BITRATE) else {
                return Vec::new();
            };
            find_bursts(&buf.samples, cfg.peak, sps * 2)
                .into_iter()
                .filter_map(|(a, b)| {
                    let part = IqBuffer { samples: buf.samples[a..b].to_vec(), ..buf.clone() };
                    let bits =
                        biphase::biphase_demodulate(&part, biphase::DEFAULT_BITRATE, cfg.biphase_prefix_ms).ok()?;
                    (!bits.is_empty()).then(|| (to_us(a), bits))
                })
                .collect()
        }
        _ => Vec::new(),
    }
}
