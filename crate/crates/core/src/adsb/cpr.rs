//! Compact Position Reporting for airborne positions.
//!
//! 17-bit encoding with NZ = 15: 60 latitude zones for even frames and 59 for
//! odd frames. Rounding is `floor(x + 0.5)` throughout, so exact halves of
//! negative operands round toward +inf.

use serde::{Deserialize, Serialize};
use thiserror::Error;

const NZ: f64 = 15.0;
const SCALE: f64 = 131_072.0; // 2^17

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CprFormat {
    Even,
    Odd,
}

impl CprFormat {
    fn index(self) -> f64 {
        match self {
            CprFormat::Even => 0.0,
            CprFormat::Odd => 1.0,
        }
    }

    pub fn from_flag(odd: bool) -> Self {
        if odd {
            CprFormat::Odd
        } else {
            CprFormat::Even
        }
    }

    pub fn is_odd(self) -> bool {
        self == CprFormat::Odd
    }

    pub fn flip(self) -> Self {
        Self::from_flag(!self.is_odd())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CprPosition {
    pub lat_cpr: u32,
    pub lon_cpr: u32,
    pub format: CprFormat,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CprError {
    #[error("latitude {0} outside [-90, 90]")]
    LatitudeOutOfRange(f64),
    #[error("even/odd pair straddles a longitude-zone boundary (NL {even} vs {odd})")]
    Ambiguous { even: u32, odd: u32 },
    #[error("decoded latitude {0} is not a valid position")]
    InvalidLatitude(f64),
    #[error("global decode needs one even and one odd position")]
    FormatMismatch,
}

fn modulo(x: f64, y: f64) -> f64 {
    x - y * (x / y).floor()
}

/// Number of longitude zones at `lat`, 1 to 59.
pub fn nl(lat: f64) -> u32 {
    let lat = lat.abs();
    if lat == 0.0 {
        return 59;
    }
    if lat == 87.0 {
        return 2;
    }
    if lat > 87.0 {
        return 1;
    }
    let a = 1.0 - (std::f64::consts::PI / (2.0 * NZ)).cos();
    let b = lat.to_radians().cos().powi(2);
    let arg = (1.0 - a / b).clamp(-1.0, 1.0);
    let v = (2.0 * std::f64::consts::PI / arg.acos()).floor();
    v.clamp(1.0, 59.0) as u32
}

pub fn encode(lat: f64, lon: f64, format: CprFormat) -> Result<CprPosition, CprError> {
    if !(-90.0..=90.0).contains(&lat) || lat.is_nan() {
        return Err(CprError::LatitudeOutOfRange(lat));
    }
    let i = format.index();
    let dlat = 360.0 / (4.0 * NZ - i);
    let yz = (SCALE * modulo(lat, dlat) / dlat + 0.5).floor();
    let rlat = dlat * (yz / SCALE + (lat / dlat).floor());
    let zones = (nl(rlat) as f64 - i).max(1.0);
    let dlon = 360.0 / zones;
    let xz = (SCALE * modulo(lon, dlon) / dlon + 0.5).floor();
    Ok(CprPosition {
        lat_cpr: modulo(yz, SCALE) as u32,
        lon_cpr: modulo(xz, SCALE) as u32,
        format,
    })
}

/// Global decode of an even/odd pair; the longitude is taken from the frame
/// named by `most_recent`.
pub fn decode_global(
    even: CprPosition,
    odd: CprPosition,
    most_recent: CprFormat,
) -> Result<(f64, f64), CprError> {
    if even.format != CprFormat::Even || odd.format != CprFormat::Odd {
        return Err(CprError::FormatMismatch);
    }
    let lat0 = even.lat_cpr as f64 / SCALE;
    let lat1 = odd.lat_cpr as f64 / SCALE;
    let lon0 = even.lon_cpr as f64 / SCALE;
    let lon1 = odd.lon_cpr as f64 / SCALE;

    let dlat0 = 360.0 / 60.0;
    let dlat1 = 360.0 / 59.0;
    let j = (59.0 * lat0 - 60.0 * lat1 + 0.5).floor();
    let mut rlat0 = dlat0 * (modulo(j, 60.0) + lat0);
    let mut rlat1 = dlat1 * (modulo(j, 59.0) + lat1);
    if rlat0 >= 270.0 {
        rlat0 -= 360.0;
    }
    if rlat1 >= 270.0 {
        rlat1 -= 360.0;
    }
    for r in [rlat0, rlat1] {
        if !(-90.0..=90.0).contains(&r) {
            return Err(CprError::InvalidLatitude(r));
        }
    }
    let (nl0, nl1) = (nl(rlat0), nl(rlat1));
    if nl0 != nl1 {
        return Err(CprError::Ambiguous { even: nl0, odd: nl1 });
    }
    let nl_lat = nl0 as f64;
    let m = (lon0 * (nl_lat - 1.0) - lon1 * nl_lat + 0.5).floor();
    let (lat, lon) = match most_recent {
        CprFormat::Even => {
            let ni = nl_lat.max(1.0);
            (rlat0, (360.0 / ni) * (modulo(m, ni) + lon0))
        }
        CprFormat::Odd => {
            let ni = (nl_lat - 1.0).max(1.0);
            (rlat1, (360.0 / ni) * (modulo(m, ni) + lon1))
        }
    };
    let lon = if lon >= 180.0 { lon - 360.0 } else { lon };
    Ok((lat, lon))
}
