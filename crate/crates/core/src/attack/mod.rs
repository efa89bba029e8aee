//! Declarative attack scenarios turned into timed frame schedules, IQ and
//! fuzz campaigns.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! protocol = "adsb"
//! attack = "spoofing"
//! duration = 10.0        # seconds
//! rate = 2.0             # messages/s; per-attack default when omitted
//! seed = 7
//! transmitters = 1
//!
//! [kinematics]
//! icao24 = 0x4840D6
//! latitude = 52.3
//! longitude = 4.76
//! altitude_ft = 12000
//! ground_speed_kt = 250
//! track_deg = 90
//! callsign = "KLM1023"
//! turn_rate_deg_s = 0.0
//!
//! [params]               # attack-specific knobs, see `catalog()`
//!
//! [raw_overrides]        # field -> value, see `fields::field_map`
//! lat = 54600000
//! ```
//!
//! Every generator is a pure function of the scenario: the same document
//! yields byte-identical schedules, IQ and fuzz logs.

pub mod fields;
pub mod fuzz;
pub mod generators;
pub mod motion;
pub mod recon;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex32;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ais::air::AirFrameOptions;
use crate::decode::TargetId;
use crate::frame::{FrameSchedule, Protocol};
use crate::modem::{self, IqBuffer, ModemConfig, ModemError};

pub use fields::RawValue;
pub use fuzz::{fuzz, FuzzOp, FuzzRecord};
pub use generators::*;
pub use motion::Kinematics;
pub use recon::{gen_reconnaissance, Inventory, InventoryRow};

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("attack {attack} is not defined for {protocol}; valid pairs: {valid}")]
    InvalidPair { protocol: Protocol, attack: AttackKind, valid: String },
    #[error("raw override: {0}")]
    Override(String),
    #[error("parameter {name}: {msg}")]
    Param { name: String, msg: String },
    #[error("fuzz corpus is empty")]
    EmptyCorpus,
    #[error("fuzz log: {0}")]
    Log(String),
    #[error("scenario config: {0}")]
    Config(String),
    #[error(transparent)]
    Adsb(#[from] crate::adsb::AdsbError),
    #[error(transparent)]
    Ais(#[from] crate::ais::AisError),
    #[error(transparent)]
    Epirb(#[from] crate::epirb::EpirbError),
    #[error(transparent)]
    Gdl90(#[from] crate::gdl90::Gdl90Error),
    #[error(transparent)]
    Ccsds(#[from] crate::ccsds::CcsdsError),
    #[error(transparent)]
    Modem(#[from] ModemError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AttackKind {
    Reconnaissance,
    Spoofing,
    Flooding,
    Jamming,
    FalseEmergency,
    Disappearance,
    TrajectoryModification,
    InvalidEncoding,
    Fuzzing,
    Dos,
    CrcAttack,
    Coordinated,
    MobAlert,
    CollisionAlert,
    OverwhelmingAlerts,
    VisualDisruption,
    ErrorHandling,
    PreambleTest,
    Replay,
}

impl AttackKind {
    pub const ALL: [AttackKind; 19] = [
        AttackKind::Reconnaissance,
        AttackKind::Spoofing,
        AttackKind::Flooding,
        AttackKind::Jamming,
        AttackKind::FalseEmergency,
        AttackKind::Disappearance,
        AttackKind::TrajectoryModification,
        AttackKind::InvalidEncoding,
        AttackKind::Fuzzing,
        AttackKind::Dos,
        AttackKind::CrcAttack,
        AttackKind::Coordinated,
        AttackKind::MobAlert,
        AttackKind::CollisionAlert,
        AttackKind::OverwhelmingAlerts,
        AttackKind::VisualDisruption,
        AttackKind::ErrorHandling,
        AttackKind::PreambleTest,
        AttackKind::Replay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttackKind::Reconnaissance => "reconnaissance",
            AttackKind::Spoofing => "spoofing",
            AttackKind::Flooding => "flooding",
            AttackKind::Jamming => "jamming",
            AttackKind::FalseEmergency => "false_emergency",
            AttackKind::Disappearance => "disappearance",
            AttackKind::TrajectoryModification => "trajectory_modification",
            AttackKind::InvalidEncoding => "invalid_encoding",
            AttackKind::Fuzzing => "fuzzing",
            AttackKind::Dos => "dos",
            AttackKind::CrcAttack => "crc_attack",
            AttackKind::Coordinated => "coordinated",
            AttackKind::MobAlert => "mob_alert",
            AttackKind::CollisionAlert => "collision_alert",
            AttackKind::OverwhelmingAlerts => "overwhelming_alerts",
            AttackKind::VisualDisruption => "visual_disruption",
            AttackKind::ErrorHandling => "error_handling",
            AttackKind::PreambleTest => "preamble_test",
            AttackKind::Replay => "replay",
        }
    }

    /// Catalog title of the attack.
    pub fn title(self) -> &'static str {
        match self {
            AttackKind::Reconnaissance => "Aircraft reconnaissance",
            AttackKind::Spoofing => "Spoofing",
            AttackKind::Flooding => "Flooding",
            AttackKind::Jamming => "Jamming",
            AttackKind::FalseEmergency => "False emergency signal",
            AttackKind::Disappearance => "Aircraft disappearance",
            AttackKind::TrajectoryModification => "Trajectory modification",
            AttackKind::InvalidEncoding => "Logically invalid data encoding",
            AttackKind::Fuzzing => "Fuzzing",
            AttackKind::Dos => "Denial-of-Service",
            AttackKind::CrcAttack => "CRC error handling",
            AttackKind::Coordinated => "Highly-coordinated attackers",
            AttackKind::MobAlert => "Fake alert: man overboard",
            AttackKind::CollisionAlert => "Fake alert: vessel collision",
            AttackKind::OverwhelmingAlerts => "Overwhelming alerts",
            AttackKind::VisualDisruption => "Visual navigation disruption",
            AttackKind::ErrorHandling => "Error handling",
            AttackKind::PreambleTest => "AIS preamble test",
            AttackKind::Replay => "Replaying",
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackKind {
    type Err = AttackError;
    fn from_str(s: &str) -> Result<Self, AttackError> {
        let k = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        let alias = match k.as_str() {
            "recon" => "reconnaissance",
            "spoof" => "spoofing",
            "flood" => "flooding",
            "jam" => "jamming",
            "emergency" => "false_emergency",
            "trajectory" => "trajectory_modification",
            "invalid" => "invalid_encoding",
            "fuzz" | "gdl90_fuzzing" => "fuzzing",
            "denial_of_service" => "dos",
            "crc" => "crc_attack",
            "mob" => "mob_alert",
            "collision" => "collision_alert",
            "replaying" => "replay",
            "preamble" => "preamble_test",
            other => other,
        };
        AttackKind::ALL
            .into_iter()
            .find(|a| a.name() == alias)
            .ok_or_else(|| AttackError::Invalid(format!("unknown attack {s:?}")))
    }
}

impl TryFrom<String> for AttackKind {
    type Error = AttackError;
    fn try_from(s: String) -> Result<Self, AttackError> {
        s.parse()
    }
}

impl From<AttackKind> for String {
    fn from(k: AttackKind) -> String {
        k.name().to_string()
    }
}

/// Attack kinds each protocol supports.
pub fn valid_kinds(protocol: Protocol) -> &'static [AttackKind] {
    use AttackKind::*;
    match protocol {
        Protocol::Adsb => &[
            Reconnaissance,
            Spoofing,
            Flooding,
            Jamming,
            FalseEmergency,
            Disappearance,
            TrajectoryModification,
            InvalidEncoding,
            Dos,
            CrcAttack,
            Coordinated,
        ],
        Protocol::Ais => &[
            Reconnaissance,
            Spoofing,
            Flooding,
            Jamming,
            MobAlert,
            CollisionAlert,
            OverwhelmingAlerts,
            VisualDisruption,
            Disappearance,
            TrajectoryModification,
            InvalidEncoding,
            Dos,
            Coordinated,
            ErrorHandling,
            PreambleTest,
        ],
        Protocol::Epirb => &[Replay, Spoofing, Fuzzing, Dos, Jamming, InvalidEncoding],
        Protocol::Gdl90 => &[Fuzzing, Spoofing, Flooding, InvalidEncoding],
        Protocol::Ccsds => &[Replay, Spoofing, Fuzzing, Dos],
    }
}

pub fn valid_pairs() -> String {
    Protocol::ALL
        .iter()
        .map(|p| {
            let names: Vec<_> = valid_kinds(*p).iter().map(|k| k.name()).collect();
            format!("{p}: {}", names.join(", "))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackScenario {
    pub protocol: Protocol,
    pub attack: AttackKind,
    pub duration: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub transmitters: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinematics: Option<Kinematics>,
    #[serde(default, skip_serializing_if = "toml::Table::is_empty")]
    pub params: toml::Table,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub raw_overrides: BTreeMap<String, RawValue>,
}

impl AttackScenario {
    pub fn new(protocol: Protocol, attack: AttackKind, duration: f64) -> Self {
        AttackScenario {
            protocol,
            attack,
            duration,
            rate: None,
            seed: 0,
            transmitters: 1,
            kinematics: None,
            params: toml::Table::new(),
            raw_overrides: BTreeMap::new(),
        }
    }

    pub fn with_rate(mut self, rate: f64) -> Self {
        self.rate = Some(rate);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_kinematics(mut self, k: Kinematics) -> Self {
        self.kinematics = Some(k);
        self
    }

    pub fn with_param(mut self, key: &str, value: impl Into<toml::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_override(mut self, field: &str, value: RawValue) -> Self {
        self.raw_overrides.insert(field.to_string(), value);
        self
    }

    pub fn from_toml(text: &str) -> Result<Self, AttackError> {
        let s: AttackScenario = toml::from_str(text).map_err(|e| AttackError::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    /// Canonical serialization; the config hash is taken over this text.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    pub fn validate(&self) -> Result<(), AttackError> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(AttackError::Invalid(format!("duration must be > 0, got {}", self.duration)));
        }
        if let Some(r) = self.rate {
            if !(r > 0.0 && r.is_finite()) {
                return Err(AttackError::Invalid(format!("rate must be > 0, got {r}")));
            }
        }
        if self.transmitters == 0 {
            return Err(AttackError::Invalid("transmitters must be >= 1".into()));
        }
        if !valid_kinds(self.protocol).contains(&self.attack) {
            return Err(AttackError::InvalidPair {
                protocol: self.protocol,
                attack: self.attack,
                valid: valid_pairs(),
            });
        }
        fields::check_names(self.protocol, &self.raw_overrides)?;
        let k = self.kinematics();
        let s = k.state();
        s.validate()?;
        if k.ground_speed_kt < 0.0 || !k.ground_speed_kt.is_finite() {
            return Err(AttackError::Invalid(format!("ground speed {} kt", k.ground_speed_kt)));
        }
        if self.protocol == Protocol::Adsb {
            let end = k.at(self.duration);
            for alt in [s.altitude_ft, end.altitude_ft] {
                crate::adsb::encode_altitude(alt)?;
            }
        }
        if self.protocol == Protocol::Ais && k.ground_speed_kt > 102.2 {
            return Err(crate::ais::AisError::Speed(k.ground_speed_kt).into());
        }
        if k.at(self.duration).latitude.abs() > 89.0 {
            return Err(AttackError::Invalid("track leaves the +/-89 degree latitude band".into()));
        }
        Ok(())
    }

    /// Scenario rate, or the per-attack default.
    pub fn rate(&self) -> f64 {
        self.rate.unwrap_or_else(|| default_rate(self.protocol, self.attack))
    }

    pub fn kinematics(&self) -> Kinematics {
        self.kinematics.clone().unwrap_or_else(|| Kinematics::default_for(self.protocol))
    }

    fn param(&self, name: &str) -> Option<&toml::Value> {
        self.params.get(name)
    }

    fn bad(name: &str, msg: impl Into<String>) -> AttackError {
        AttackError::Param { name: name.into(), msg: msg.into() }
    }

    pub fn param_f64(&self, name: &str, default: f64) -> Result<f64, AttackError> {
        match self.param(name) {
            None => Ok(default),
            Some(toml::Value::Float(f)) => Ok(*f),
            Some(toml::Value::Integer(i)) => Ok(*i as f64),
            Some(v) => Err(Self::bad(name, format!("expected a number, got {v}"))),
        }
    }

    pub fn param_u64(&self, name: &str, default: u64) -> Result<u64, AttackError> {
        match self.param(name) {
            None => Ok(default),
            Some(toml::Value::Integer(i)) if *i >= 0 => Ok(*i as u64),
            Some(v) => Err(Self::bad(name, format!("expected a non-negative integer, got {v}"))),
        }
    }

    pub fn param_bool(&self, name: &str, default: bool) -> Result<bool, AttackError> {
        match self.param(name) {
            None => Ok(default),
            Some(toml::Value::Boolean(b)) => Ok(*b),
            Some(v) => Err(Self::bad(name, format!("expected true/false, got {v}"))),
        }
    }

    pub fn param_str<'a>(&'a self, name: &str, default: &'a str) -> Result<&'a str, AttackError> {
        match self.param(name) {
            None => Ok(default),
            Some(toml::Value::String(s)) => Ok(s),
            Some(v) => Err(Self::bad(name, format!("expected a string, got {v}"))),
        }
    }

    pub fn param_list_i64(&self, name: &str) -> Result<Option<Vec<i64>>, AttackError> {
        match self.param(name) {
            None => Ok(None),
            Some(toml::Value::Array(a)) => a
                .iter()
                .map(|v| v.as_integer().ok_or_else(|| Self::bad(name, "expected integers")))
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(v) => Err(Self::bad(name, format!("expected an array, got {v}"))),
        }
    }

    pub fn param_list_str(&self, name: &str) -> Result<Option<Vec<String>>, AttackError> {
        match self.param(name) {
            None => Ok(None),
            Some(toml::Value::Array(a)) => a
                .iter()
                .map(|v| v.as_str().map(str::to_string).ok_or_else(|| Self::bad(name, "expected strings")))
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(v) => Err(Self::bad(name, format!("expected an array, got {v}"))),
        }
    }
}

/// Default message rate per attack: 2 Hz ADS-B position, one AIS report per
/// 10 s, 100 msg/s floods, 1000 msg/s DoS.
pub fn default_rate(protocol: Protocol, attack: AttackKind) -> f64 {
    use AttackKind::*;
    match (protocol, attack) {
        (_, Flooding) => 100.0,
        (_, Dos) if protocol == Protocol::Epirb => 2.0,
        (_, Dos) => 1000.0,
        (_, Fuzzing) if protocol == Protocol::Epirb => 2.0,
        (_, Fuzzing) => 100.0,
        (_, PreambleTest | ErrorHandling) => 1.0,
        (Protocol::Ais, VisualDisruption | OverwhelmingAlerts) => 10.0,
        (Protocol::Ais, _) => 0.1,
        (Protocol::Epirb, _) => 0.02,
        (Protocol::Ccsds, _) => 10.0,
        (Protocol::Gdl90, _) => 1.0,
        (Protocol::Adsb, _) => 2.0,
    }
}

/// Ground-truth sample of a synthetic target.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthPoint {
    pub timestamp_us: u64,
    pub id: TargetId,
    pub latitude: f64,
    pub longitude: f64,
    pub altitude_ft: Option<f64>,
}

/// Per-frame AIS air-layer variant, for attacks that vary the framing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AirVariant {
    pub label: String,
    pub options: AirFrameOptions,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AttackOutput {
    pub schedule: Option<FrameSchedule>,
    /// Parallel to the schedule entries when non-empty.
    pub air_variants: Vec<AirVariant>,
    /// Waveform-level output (jamming).
    pub iq: Option<IqBuffer>,
    pub truth: Vec<TruthPoint>,
    pub fuzz_log: Vec<FuzzRecord>,
    pub inventory: Option<Inventory>,
}

impl AttackOutput {
    pub fn from_schedule(schedule: FrameSchedule) -> Self {
        AttackOutput { schedule: Some(schedule), ..Default::default() }
    }

    pub fn schedule(&self) -> &FrameSchedule {
        self.schedule.as_ref().expect("attack produced a schedule")
    }

    /// Baseband for the whole attack: the generated waveform if any,
    /// otherwise the schedule modulated with per-frame AIS variants.
    /// `None` for protocols without a waveform.
    pub fn modulate(&self, cfg: &ModemConfig) -> Result<Option<IqBuffer>, ModemError> {
        if let Some(iq) = &self.iq {
            return Ok(Some(iq.clone()));
        }
        let Some(s) = &self.schedule else { return Ok(None) };
        if matches!(s.protocol, Protocol::Gdl90 | Protocol::Ccsds) {
            return Ok(None);
        }
        if self.air_variants.is_empty() {
            return modem::modulate_schedule(s, cfg).map(Some);
        }
        let rate = cfg.sample_rate(s.protocol)?;
        let mut buf = IqBuffer::new(rate, modem::center_freq(s.protocol));
        for (e, v) in s.entries.iter().zip(&self.air_variants) {
            let c = ModemConfig { ais_air: v.options, ..cfg.clone() };
            let at = (e.timestamp_us as f64 * rate / 1e6).round() as usize;
            let burst: Vec<Complex32> = modem::burst(s.protocol, &e.frame.bits, &c)?;
            buf.mix_at(at, &burst, cfg.peak);
        }
        Ok(Some(buf))
    }
}

/// Runs the generator the scenario names.
pub fn generate(s: &AttackScenario) -> Result<AttackOutput, AttackError> {
    s.validate()?;
    generators::dispatch(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    /// "adsb", "ais" or "satellite".
    pub family: &'static str,
    pub title: &'static str,
    pub scenario: AttackScenario,
}

/// Every cataloged attack with a small default scenario: 12 ADS-B kinds
/// (GDL-90 fuzzing included), 11 AIS kinds, and the replay/spoof/fuzz/DoS
/// sets for EPIRB and CCSDS.
pub fn catalog() -> Vec<CatalogEntry> {
    use AttackKind::*;
    let mut v = Vec::new();
    let mut add = |family, protocol, kind: AttackKind, duration: f64, f: &dyn Fn(AttackScenario) -> AttackScenario| {
        let s = f(AttackScenario::new(protocol, kind, duration).with_seed(1));
        v.push(CatalogEntry { family, title: kind.title(), scenario: s });
    };
    let id = &|s: AttackScenario| s;
    let ship = || Kinematics { ground_speed_kt: 12.0, track_deg: 45.0, altitude_ft: 0.0, ..Kinematics::default() };
    let adsb = Protocol::Adsb;
    add("adsb", adsb, Reconnaissance, 10.0, id);
    add("adsb", adsb, Spoofing, 10.0, id);
    add("adsb", adsb, Flooding, 10.0, &|s| s.with_param("n_targets", 1000));
    add("adsb", adsb, Jamming, 0.05, id);
    add("adsb", adsb, FalseEmergency, 10.0, &|s| s.with_param("emergency", "unlawful_interference"));
    add("adsb", adsb, Disappearance, 10.0, &|s| s.with_param("vanish_at", 6.0));
    add("adsb", adsb, TrajectoryModification, 10.0, &|s| {
        s.with_param("offset_east_m", 1000.0).with_param("drift_north_mps", 10.0)
    });
    add("adsb", adsb, InvalidEncoding, 10.0, &|s| {
        s.with_override("callsign", RawValue::Text("0xFFFFFFFFFFFF".into()))
    });
    add("adsb", Protocol::Gdl90, Fuzzing, 10.0, &|s| s.with_param("iterations", 500));
    add("adsb", adsb, Dos, 2.0, id);
    add("adsb", adsb, CrcAttack, 10.0, &|s| s.with_param("mode", "flip_bits").with_param("k", 1));
    add("adsb", adsb, Coordinated, 10.0, &|s| {
        let mut s = s.with_param("offsets_us", toml::Value::Array(vec![0.into(), 12.into(), 30.into()]));
        s.transmitters = 3;
        s
    });
    let ais = Protocol::Ais;
    let k = ship();
    add("ais", ais, Spoofing, 60.0, &|s| s.with_kinematics(k.clone()));
    add("ais", ais, MobAlert, 60.0, &|s| s.with_kinematics(k.clone()));
    add("ais", ais, CollisionAlert, 300.0, &|s| s.with_kinematics(k.clone()).with_param("cpa_m", 50.0));
    add("ais", ais, Jamming, 0.5, id);
    add("ais", ais, OverwhelmingAlerts, 10.0, &|s| s.with_kinematics(k.clone()));
    add("ais", ais, VisualDisruption, 10.0, &|s| s.with_kinematics(k.clone()).with_param("n_ghosts", 24));
    add("ais", ais, InvalidEncoding, 60.0, &|s| {
        s.with_kinematics(k.clone()).with_override("lat", RawValue::Int(crate::ais::LAT_UNAVAILABLE as i64))
    });
    add("ais", ais, Dos, 2.0, &|s| s.with_kinematics(k.clone()));
    add("ais", ais, Coordinated, 60.0, &|s| {
        let mut s = s.with_kinematics(k.clone());
        s.transmitters = 2;
        s
    });
    add("ais", ais, ErrorHandling, 10.0, &|s| s.with_kinematics(k.clone()));
    add("ais", ais, PreambleTest, 20.0, &|s| s.with_kinematics(k.clone()));
    let epirb = Protocol::Epirb;
    let beacon = Kinematics { ground_speed_kt: 2.0, ..ship() };
    add("satellite", epirb, Replay, 200.0, &|s| s.with_kinematics(beacon.clone()));
    add("satellite", epirb, Spoofing, 300.0, &|s| s.with_kinematics(beacon.clone()));
    add("satellite", epirb, Fuzzing, 50.0, &|s| s.with_kinematics(beacon.clone()).with_param("iterations", 100));
    add("satellite", epirb, Dos, 10.0, &|s| s.with_kinematics(beacon.clone()));
    let ccsds = Protocol::Ccsds;
    add("satellite", ccsds, Replay, 1.0, &|s| s.with_param("count", 10));
    add("satellite", ccsds, Spoofing, 2.0, id);
    add("satellite", ccsds, Fuzzing, 2.0, &|s| s.with_param("iterations", 200));
    add("satellite", ccsds, Dos, 1.0, id);
    v
}
