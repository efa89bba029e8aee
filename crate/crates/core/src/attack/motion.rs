//! Flat-earth kinematics: constant speed, constant turn rate and constant
//! vertical rate from an initial state. Good to well under a metre over the
//! few-kilometre tracks scenarios use.

use serde::{Deserialize, Serialize};

use crate::adsb::KinematicState;

pub const METERS_PER_DEG_LAT: f64 = 111_320.0;
pub const KT_TO_MPS: f64 = 1852.0 / 3600.0;

/// Initial target state plus motion model, as written in a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Kinematics {
    #[serde(default = "default_icao")]
    pub icao24: u32,
    #[serde(default = "default_mmsi")]
    pub mmsi: u32,
    pub latitude: f64,
    pub longitude: f64,
    #[serde(default)]
    pub altitude_ft: f64,
    #[serde(default)]
    pub ground_speed_kt: f64,
    #[serde(default)]
    pub track_deg: f64,
    #[serde(default)]
    pub callsign: String,
    /// Degrees per second, positive to the right.
    #[serde(default)]
    pub turn_rate_deg_s: f64,
    #[serde(default)]
    pub vertical_rate_fpm: f64,
}

fn default_icao() -> u32 {
    0xA1B2C3
}

fn default_mmsi() -> u32 {
    244_123_456
}

impl Default for Kinematics {
    fn default() -> Self {
        Kinematics {
            icao24: default_icao(),
            mmsi: default_mmsi(),
            latitude: 52.3,
            longitude: 4.76,
            altitude_ft: 12_000.0,
            ground_speed_kt: 250.0,
            track_deg: 90.0,
            callsign: "SAAMD01".into(),
            turn_rate_deg_s: 0.0,
            vertical_rate_fpm: 0.0,
        }
    }
}

impl Kinematics {
    /// Aircraft defaults for aviation protocols, a slow vessel for maritime ones.
    pub fn default_for(protocol: crate::frame::Protocol) -> Self {
        use crate::frame::Protocol;
        match protocol {
            Protocol::Ais | Protocol::Epirb => Kinematics {
                altitude_ft: 0.0,
                ground_speed_kt: 12.0,
                track_deg: 45.0,
                callsign: String::new(),
                ..Kinematics::default()
            },
            _ => Kinematics::default(),
        }
    }
}

/// (east, north) displacement in metres after `t` seconds.
pub fn displacement(speed_mps: f64, track_deg: f64, turn_rate_deg_s: f64, t: f64) -> (f64, f64) {
    let h0 = track_deg.to_radians();
    let w = turn_rate_deg_s.to_radians();
    if w.abs() < 1e-12 {
        (speed_mps * t * h0.sin(), speed_mps * t * h0.cos())
    } else {
        let h = h0 + w * t;
        (speed_mps / w * (h0.cos() - h.cos()), speed_mps / w * (h.sin() - h0.sin()))
    }
}

/// Shifts a position by metres east/north, scaling longitude at `lat`.
pub fn offset_position(lat: f64, lon: f64, east_m: f64, north_m: f64) -> (f64, f64) {
    let lat2 = lat + north_m / METERS_PER_DEG_LAT;
    let lon2 = lon + east_m / (METERS_PER_DEG_LAT * lat.to_radians().cos());
    (lat2, wrap_lon(lon2))
}

pub fn wrap_lon(lon: f64) -> f64 {
    (lon + 180.0).rem_euclid(360.0) - 180.0
}

/// Local (east, north) metres of `(lat, lon)` relative to `(lat0, lon0)`.
pub fn local_en(lat0: f64, lon0: f64, lat: f64, lon: f64) -> (f64, f64) {
    let dlon = wrap_lon(lon - lon0);
    (dlon * METERS_PER_DEG_LAT * lat0.to_radians().cos(), (lat - lat0) * METERS_PER_DEG_LAT)
}

impl Kinematics {
    pub fn state(&self) -> KinematicState {
        KinematicState {
            latitude: self.latitude,
            longitude: self.longitude,
            altitude_ft: self.altitude_ft,
            ground_speed_kt: self.ground_speed_kt,
            track_deg: self.track_deg,
            callsign: self.callsign.clone(),
            squawk_emergency: false,
        }
    }

    /// State after `t` seconds. Longitude scales at the initial latitude.
    pub fn at(&self, t: f64) -> KinematicState {
        let (e, n) = displacement(self.ground_speed_kt * KT_TO_MPS, self.track_deg, self.turn_rate_deg_s, t);
        let lat = self.latitude + n / METERS_PER_DEG_LAT;
        let lon = wrap_lon(self.longitude + e / (METERS_PER_DEG_LAT * self.latitude.to_radians().cos()));
        KinematicState {
            latitude: lat,
            longitude: lon,
            altitude_ft: self.altitude_ft + self.vertical_rate_fpm * t / 60.0,
            track_deg: (self.track_deg + self.turn_rate_deg_s * t).rem_euclid(360.0),
            ..self.state()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_line_east() {
        let k = Kinematics { ground_speed_kt: 360.0, track_deg: 90.0, ..Kinematics::default() };
        let s = k.at(10.0);
        let (e, n) = local_en(k.latitude, k.longitude, s.latitude, s.longitude);
        assert!((e - 360.0 * KT_TO_MPS * 10.0).abs() < 1e-6);
        assert!(n.abs() < 1e-9);
    }

    #[test]
    fn full_turn_returns_home() {
        let k = Kinematics { turn_rate_deg_s: 3.0, ..Kinematics::default() };
        let s = k.at(120.0);
        assert!((s.latitude - k.latitude).abs() < 1e-9);
        assert!((s.longitude - k.longitude).abs() < 1e-9);
        assert!((s.track_deg - k.track_deg).abs() < 1e-9);
    }

    #[test]
    fn turn_matches_numeric_integration() {
        let (v, h, w, t) = (100.0, 30.0, 2.0, 37.0);
        let (e, n) = displacement(v, h, w, t);
        let steps = 200_000;
        let dt = t / steps as f64;
        let (mut ie, mut in_) = (0.0, 0.0);
        for i in 0..steps {
            let hh = (h + w * (i as f64 + 0.5) * dt).to_radians();
            ie += v * hh.sin() * dt;
            in_ += v * hh.cos() * dt;
        }
        assert!((e - ie).abs() < 1e-3 && (n - in_).abs() < 1e-3);
    }
}
