//! IQ sample files with a `key=value` metadata sidecar at `<path>.meta`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex32;

use super::{IqBuffer, ModemError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IqFormat {
    /// Little-endian f32 I,Q pairs.
    Cf32,
    /// Signed 8-bit I,Q pairs, full scale = 127.
    Cs8,
}

impl IqFormat {
    pub fn bytes_per_sample(self) -> usize {
        match self {
            IqFormat::Cf32 => 8,
            IqFormat::Cs8 => 2,
        }
    }

    /// Guesses from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()?.to_str()?.parse().ok()
    }
}

impl fmt::Display for IqFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IqFormat::Cf32 => "cf32",
            IqFormat::Cs8 => "cs8",
        })
    }
}

impl FromStr for IqFormat {
    type Err = ModemError;

    fn from_str(s: &str) -> Result<Self, ModemError> {
        match s.to_ascii_lowercase().as_str() {
            "cf32" | "fc32" => Ok(IqFormat::Cf32),
            "cs8" | "sc8" => Ok(IqFormat::Cs8),
            other => Err(ModemError::Format(format!("unknown format {other:?}"))),
        }
    }
}

pub fn meta_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".meta");
    PathBuf::from(p)
}

pub fn encode(buf: &IqBuffer, format: IqFormat) -> Vec<u8> {
    let mut out = Vec::with_capacity(buf.len() * format.bytes_per_sample());
    for s in &buf.samples {
        match format {
            IqFormat::Cf32 => {
                out.extend_from_slice(&s.re.to_le_bytes());
                out.extend_from_slice(&s.im.to_le_bytes());
            }
            IqFormat::Cs8 => {
                let q = |v: f32| (v * 127.0).round().clamp(-127.0, 127.0) as i8 as u8;
                out.push(q(s.re));
                out.push(q(s.im));
            }
        }
    }
    out
}

pub fn decode(bytes: &[u8], format: IqFormat) -> Result<Vec<Complex32>, ModemError> {
    let n = format.bytes_per_sample();
    if !bytes.len().is_multiple_of(n) {
        return Err(ModemError::Format(format!("{} bytes is not a whole number of {format} samples", bytes.len())));
    }
    Ok(bytes
        .chunks_exact(n)
        .map(|c| match format {
            IqFormat::Cf32 => Complex32::new(
                f32::from_le_bytes([c[0], c[1], c[2], c[3]]),
                f32::from_le_bytes([c[4], c[5], c[6], c[7]]),
            ),
            IqFormat::Cs8 => Complex32::new(c[0] as i8 as f32 / 127.0, c[1] as i8 as f32 / 127.0),
        })
        .collect())
}

fn write_atomic(path: &Path, data: &[u8]) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, data)?;
    fs::rename(&tmp, path)
}

pub fn iq_write(buf: &IqBuffer, path: &Path, format: IqFormat) -> Result<(), ModemError> {
    write_atomic(path, &encode(buf, format))?;
    let meta = format!(
        "sample_rate={}\ncenter_freq_label={}\nformat={format}\n",
        buf.sample_rate, buf.center_freq_label
    );
    write_atomic(&meta_path(path), meta.as_bytes())?;
    Ok(())
}

pub fn iq_read(path: &Path, format: IqFormat) -> Result<IqBuffer, ModemError> {
    let meta = fs::read_to_string(meta_path(path))
        .map_err(|e| ModemError::Meta(format!("{}: {e}", meta_path(path).display())))?;
    let mut sample_rate = None;
    let mut center = 0.0;
    for line in meta.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (k, v) = line.split_once('=').ok_or_else(|| ModemError::Meta(format!("bad line {line:?}")))?;
        let num = || v.trim().parse::<f64>().map_err(|_| ModemError::Meta(format!("bad {k} value {v:?}")));
        match k.trim() {
            "sample_rate" => sample_rate = Some(num()?),
            "center_freq_label" => center = num()?,
            "format" => {
                let f: IqFormat = v.trim().parse()?;
                if f != format {
                    return Err(ModemError::Meta(format!("file is {f}, asked to read {format}")));
                }
            }
            _ => {}
        }
    }
    let sample_rate = sample_rate
        .filter(|r| *r > 0.0)
        .ok_or_else(|| ModemError::Meta("missing or non-positive sample_rate".into()))?;
    let samples = decode(&fs::read(path)?, format)?;
    Ok(IqBuffer { samples, sample_rate, center_freq_label: center })
}
