//! Software receiver under test.
//!
//! A deliberately small model of a cockpit or bridge receiver: a processing
//! budget per simulated second, a bounded track table, a bounded alert queue
//! and a strictness switch. It exists to make attack outcomes comparable
//! across parameter sets, not to emulate any particular device.

pub mod loopback;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attack::generators::cpa;
use crate::attack::motion::{local_en, Kinematics, KT_TO_MPS};
use crate::decode::{decode_any, AlertKind, Decoded, Payload, TargetId};
use crate::frame::{FrameSchedule, Protocol};
use crate::modem::{self, IqBuffer, ModemConfig, ModemError};

pub use loopback::{preamble_sensitivity, verify_loopback, FrameDiff, LoopbackReport, PreambleRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("input is {input} but the receiver model is {model}")]
    ProtocolMismatch { model: Protocol, input: Protocol },
    #[error("invalid receiver model: {0}")]
    Invalid(String),
    #[error("receiver model config: {0}")]
    Config(#[from] toml::de::Error),
    #[error(transparent)]
    Modem(#[from] ModemError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Eviction {
    #[default]
    Lru,
    RejectNew,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    /// Any diagnosis rejects the message.
    #[default]
    Strict,
    /// Only messages that could not be decoded at all are rejected.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverModel {
    pub protocol: Protocol,
    #[serde(default = "d_track_capacity")]
    pub track_capacity: usize,
    #[serde(default)]
    pub eviction: Eviction,
    /// Messages processed per simulated second; the rest are dropped.
    #[serde(default = "d_budget")]
    pub per_second_budget: u32,
    /// Seconds without a message before a track expires. Defaults to 60 for
    /// aviation protocols and 360 for maritime ones.
    #[serde(default)]
    pub track_timeout_s: Option<f64>,
    #[serde(default = "d_alert_capacity")]
    pub alert_queue_capacity: usize,
    /// Alerts acknowledged per simulated second.
    #[serde(default = "d_alert_drain")]
    pub alert_drain_per_s: u32,
    #[serde(default)]
    pub strictness: Strictness,
    /// Minimum AIS training bits the receiver needs to lock.
    #[serde(default)]
    pub preamble_tolerance: usize,
    /// Whether a training sequence in the opposite phase still locks.
    #[serde(default = "d_true")]
    pub accept_inverted: bool,
    /// Own vessel, enabling collision alerts from AIS traffic.
    #[serde(default)]
    pub ownship: Option<Kinematics>,
    #[serde(default = "d_cpa")]
    pub cpa_threshold_m: f64,
    #[serde(default = "d_tcpa")]
    pub tcpa_horizon_s: f64,
    #[serde(default)]
    pub thresholds: Thresholds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// `dos` when dropped / input exceeds this.
    #[serde(default = "d_half")]
    pub dos_drop_ratio: f64,
    /// `dos` when evicted exceeds this fraction of created tracks.
    #[serde(default = "d_half")]
    pub dos_eviction_ratio: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { dos_drop_ratio: 0.5, dos_eviction_ratio: 0.5 }
    }
}

fn d_track_capacity() -> usize {
    100
}
fn d_budget() -> u32 {
    400
}
fn d_alert_capacity() -> usize {
    20
}
fn d_alert_drain() -> u32 {
    1
}
fn d_true() -> bool {
    true
}
fn d_cpa() -> f64 {
    500.0
}
fn d_tcpa() -> f64 {
    600.0
}
fn d_half() -> f64 {
    0.5
}

impl ReceiverModel {
    pub fn new(protocol: Protocol) -> Self {
        ReceiverModel {
            protocol,
            track_capacity: d_track_capacity(),
            eviction: Eviction::Lru,
            per_second_budget: d_budget(),
            track_timeout_s: None,
            alert_queue_capacity: d_alert_capacity(),
            alert_drain_per_s: d_alert_drain(),
            strictness: Strictness::Strict,
            preamble_tolerance: 0,
            accept_inverted: true,
            ownship: None,
            cpa_threshold_m: d_cpa(),
            tcpa_horizon_s: d_tcpa(),
            thresholds: Thresholds::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let m: ReceiverModel = toml::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn track_timeout(&self) -> f64 {
        self.track_timeout_s.unwrap_or(match self.protocol {
            Protocol::Ais | Protocol::Epirb => 360.0,
            _ => 60.0,
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Invalid(m.into()));
        if self.track_capacity == 0 {
            return bad("track_capacity must be positive");
        }
        if self.per_second_budget == 0 {
            return bad("per_second_budget must be positive");
        }
        if self.alert_queue_capacity == 0 {
            return bad("alert_queue_capacity must be positive");
        }
        if !(self.track_timeout() > 0.0) {
            return bad("track_timeout_s must be positive");
        }
        if !(self.cpa_threshold_m >= 0.0 && self.tcpa_horizon_s >= 0.0) {
            return bad("cpa_threshold_m and tcpa_horizon_s must be non-negative");
        }
        Ok(())
    }
}

pub enum HarnessInput<'a> {
    Schedule(&'a FrameSchedule),
    /// Demodulated first; bursts failing the air-layer checksum never reach
    /// the receiver.
    Iq(&'a IqBuffer),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Ok,
    Degraded,
    Dos,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Ok => "ok",
            Verdict::Degraded => "degraded",
            Verdict::Dos => "dos",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub protocol: Protocol,
    pub input_count: u64,
    pub decoded_count: u64,
    /// Rejected by integrity or (strict) field validation.
    pub crc_fail_count: u64,
    /// Over the processing budget.
    pub messages_dropped: u64,
    /// Diagnosis issue keys over every processed message.
    pub diagnosis_histogram: BTreeMap<String, u64>,
    pub kind_histogram: BTreeMap<String, u64>,
    pub tracks_created: u64,
    pub tracks_evicted: u64,
    pub tracks_expired: u64,
    pub tracks_rejected: u64,
    pub tracks_active: u64,
    pub alerts_raised: u64,
    pub alerts_dropped: u64,
    pub alert_histogram: BTreeMap<String, u64>,
    pub verdict: Verdict,
}

impl HarnessReport {
    pub fn drop_ratio(&self) -> f64 {
        if self.input_count == 0 {
            0.0
        } else {
            self.messages_dropped as f64 / self.input_count as f64
        }
    }

    /// `key=value` lines; histograms use dotted keys.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("protocol", &self.protocol);
        kv("input_count", &self.input_count);
        kv("decoded_count", &self.decoded_count);
        kv("crc_fail_count", &self.crc_fail_count);
        kv("messages_dropped", &self.messages_dropped);
        kv("drop_ratio", &format!("{:.4}", self.drop_ratio()));
        kv("tracks_created", &self.tracks_created);
        kv("tracks_evicted", &self.tracks_evicted);
        kv("tracks_expired", &self.tracks_expired);
        kv("tracks_rejected", &self.tracks_rejected);
        kv("tracks_active", &self.tracks_active);
        kv("alerts_raised", &self.alerts_raised);
        kv("alerts_dropped", &self.alerts_dropped);
        for (prefix, h) in [("diag", &self.diagnosis_histogram), ("kind", &self.kind_histogram), ("alert", &self.alert_histogram)] {
            for (k, v) in h {
                kv(&format!("{prefix}.{k}"), v);
            }
        }
        kv("verdict", &self.verdict.name());
        s
    }
}

struct TrackTable {
    capacity: usize,
    timeout_us: u64,
    eviction: Eviction,
    last_seen: HashMap<TargetId, (u64, u64)>,
    /// (last seen µs, insertion sequence, id), oldest first.
    order: BTreeSet<(u64, u64, TargetId)>,
    seq: u64,
    created: u64,
    evicted: u64,
    expired: u64,
    rejected: u64,
}

impl TrackTable {
    fn expire(&mut self, now: u64) {
        while let Some((t, _, _)) = self.order.first() {
            if now.saturating_sub(*t) < self.timeout_us {
                break;
            }
            let (_, _, id) = self.order.pop_first().expect("non-empty");
            self.last_seen.remove(&id);
            self.expired += 1;
        }
    }

    fn touch(&mut self, id: TargetId, now: u64) {
        self.expire(now);
        self.seq += 1;
        if let Some(&(t, q)) = self.last_seen.get(&id) {
            self.order.remove(&(t, q, id.clone()));
            self.order.insert((now, self.seq, id.clone()));
            self.last_seen.insert(id, (now, self.seq));
            return;
        }
        if self.last_seen.len() >= self.capacity {
            match self.eviction {
                Eviction::RejectNew => {
                    self.rejected += 1;
                    return;
                }
                Eviction::Lru => {
                    let (_, _, old) = self.order.pop_first().expect("table is full");
                    self.last_seen.remove(&old);
                    self.evicted += 1;
                }
            }
        }
        self.order.insert((now, self.seq, id.clone()));
        self.last_seen.insert(id, (now, self.seq));
        self.created += 1;
    }
}

fn collision_alert(model: &ReceiverModel, d: &Decoded, ts_us: u64) -> bool {
    let (Some(own), Payload::Ais(a)) = (&model.ownship, &d.payload) else { return false };
    let Some(m) = &a.message else { return false };
    let (Some((lat, lon)), Some((sog, cog))) = (m.position(), m.motion()) else { return false };
    let t = ts_us as f64 / 1e6;
    let o = own.at(t);
    let rel = local_en(o.latitude, o.longitude, lat, lon);
    let v = |speed_kt: f64, track: f64| {
        let r = track.to_radians();
        (speed_kt * KT_TO_MPS * r.sin(), speed_kt * KT_TO_MPS * r.cos())
    };
    let vi = v(sog, cog);
    let vo = v(o.ground_speed_kt, o.track_deg);
    let (dist, tcpa) = cpa(rel, (vi.0 - vo.0, vi.1 - vo.1));
    dist <= model.cpa_threshold_m && tcpa <= model.tcpa_horizon_s
}

fn demodulated(protocol: Protocol, iq: &IqBuffer) -> Vec<(u64, crate::Bits)> {
    modem::demodulate_stream(protocol, iq, &ModemConfig::default())
}

/// Runs `input` through the model over `wall` simulated seconds (all of it
/// when `None`); frames at or after `wall` are not part of the input.
pub fn run(model: &ReceiverModel, input: HarnessInput, wall: Option<f64>) -> Result<HarnessReport, HarnessError> {
    model.validate()?;
    let owned;
    let frames: Vec<(u64, &[bool])> = match input {
        HarnessInput::Schedule(s) => {
            if s.protocol != model.protocol {
                return Err(HarnessError::ProtocolMismatch { model: model.protocol, input: s.protocol });
            }
            s.entries.iter().map(|e| (e.timestamp_us, &e.frame.bits[..])).collect()
        }
        HarnessInput::Iq(iq) => {
            if !matches!(model.protocol, Protocol::Adsb | Protocol::Ais | Protocol::Epirb) {
                return Err(ModemError::Unsupported(model.protocol).into());
            }
            owned = demodulated(model.protocol, iq);
            owned.iter().map(|(t, b)| (*t, &b[..])).collect()
        }
    };
    let limit = wall.map(|w| (w * 1e6).round() as u64);
    let lenient = model.strictness == Strictness::Lenient;

    let mut r = HarnessReport {
        protocol: model.protocol,
        input_count: 0,
        decoded_count: 0,
        crc_fail_count: 0,
        messages_dropped: 0,
        diagnosis_histogram: BTreeMap::new(),
        kind_histogram: BTreeMap::new(),
        tracks_created: 0,
        tracks_evicted: 0,
        tracks_expired: 0,
        tracks_rejected: 0,
        tracks_active: 0,
        alerts_raised: 0,
        alerts_dropped: 0,
        alert_histogram: BTreeMap::new(),
        verdict: Verdict::Ok,
    };
    let mut tracks = TrackTable {
        capacity: model.track_capacity,
        timeout_us: (model.track_timeout() * 1e6).round() as u64,
        eviction: model.eviction,
        last_seen: HashMap::new(),
        order: BTreeSet::new(),
        seq: 0,
        created: 0,
        evicted: 0,
        expired: 0,
        rejected: 0,
    };
    // fixed one-second windows
    let mut window = u64::MAX;
    let mut used = 0u32;
    let mut alert_queue = 0usize;
    let mut alert_window = 0u64;
    let mut raised: HashSet<(TargetId, AlertKind)> = HashSet::new();
    let mut last_ts = 0;

    for (ts, bits) in frames {
        if limit.is_some_and(|l| ts >= l) {
            continue;
        }
        r.input_count += 1;
        last_ts = last_ts.max(ts);
        let w = ts / 1_000_000;
        if w != window {
            window = w;
            used = 0;
        }
        if used >= model.per_second_budget {
            r.messages_dropped += 1;
            continue;
        }
        used += 1;

        let d = decode_any(model.protocol, bits, lenient);
        for i in &d.diagnosis.issues {
            *r.diagnosis_histogram.entry(i.key().to_string()).or_default() += 1;
        }
        let rejected = !d.has_message() || (!lenient && !d.diagnosis.is_empty());
        if rejected {
            r.crc_fail_count += 1;
            continue;
        }
        r.decoded_count += 1;
        *r.kind_histogram.entry(d.kind().to_string()).or_default() += 1;
        let Some(id) = d.identity() else { continue };
        tracks.touch(id.clone(), ts);

        let mut alerts: Vec<AlertKind> = d.alert().into_iter().collect();
        if collision_alert(model, &d, ts) {
            alerts.push(AlertKind::Collision);
        }
        for kind in alerts {
            if !raised.insert((id.clone(), kind)) {
                continue;
            }
            if w > alert_window {
                let drained = (w - alert_window) as usize * model.alert_drain_per_s as usize;
                alert_queue = alert_queue.saturating_sub(drained);
                alert_window = w;
            }
            if alert_queue < model.alert_queue_capacity {
                alert_queue += 1;
                r.alerts_raised += 1;
                *r.alert_histogram.entry(format!("{kind:?}").to_lowercase()).or_default() += 1;
            } else {
                r.alerts_dropped += 1;
            }
        }
    }
    tracks.expire(limit.unwrap_or(last_ts));
    r.tracks_created = tracks.created;
    r.tracks_evicted = tracks.evicted;
    r.tracks_expired = tracks.expired;
    r.tracks_rejected = tracks.rejected;
    r.tracks_active = tracks.last_seen.len() as u64;

    let t = model.thresholds;
    r.verdict = if r.drop_ratio() > t.dos_drop_ratio
        || r.tracks_evicted as f64 > r.tracks_created as f64 * t.dos_eviction_ratio
    {
        Verdict::Dos
    } else if r.messages_dropped > 0 || r.alerts_dropped > 0 || r.tracks_evicted > 0 || r.tracks_rejected > 0 {
        Verdict::Degraded
    } else {
        Verdict::Ok
    };
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetReport {
    pub reports: Vec<HarnessReport>,
    pub affected: usize,
    pub total: usize,
    pub affected_fraction: f64,
}

/// Runs every model on the same input in parallel; a model is affected when
/// its verdict is not `ok`.
pub fn fleet_run(models: &[ReceiverModel], schedule: &FrameSchedule, wall: Option<f64>) -> Result<FleetReport, HarnessError> {
    let reports = models
        .par_iter()
        .map(|m| run(m, HarnessInput::Schedule(schedule), wall))
        .collect::<Result<Vec<_>, _>>()?;
    let affected = reports.iter().filter(|r| r.verdict != Verdict::Ok).count();
    let total = reports.len();
    Ok(FleetReport {
        reports,
        affected,
        total,
        affected_fraction: if total == 0 { 0.0 } else { affected as f64 / total as f64 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attack::{gen_flood, gen_spoof, AttackKind, AttackScenario};
    use proptest::prelude::*;

    fn flood(rate: f64, n: usize, duration: f64) -> FrameSchedule {
        let s = AttackScenario::new(Protocol::Adsb, AttackKind::Flooding, duration).with_rate(rate).with_seed(5);
        gen_flood(&s, n).unwrap().schedule.unwrap()
    }

    #[test]
    fn twice_the_budget_drops_half() {
        let m = ReceiverModel::new(Protocol::Adsb);
        let r = run(&m, HarnessInput::Schedule(&flood(800.0, 50, 10.0)), None).unwrap();
        assert_eq!(r.input_count, 8000);
        assert!((r.drop_ratio() - 0.5).abs() <= 0.01, "{}", r.drop_ratio());
    }

    #[test]
    fn lru_evicts_all_but_capacity() {
        let m = ReceiverModel::new(Protocol::Adsb);
        let r = run(&m, HarnessInput::Schedule(&flood(100.0, 1000, 10.0)), None).unwrap();
        assert_eq!(r.tracks_created, 1000);
        assert_eq!(r.tracks_evicted, 900);
        assert_eq!(r.verdict, Verdict::Dos);
    }

    #[test]
    fn reject_new_keeps_first_tracks() {
        let m = ReceiverModel { eviction: Eviction::RejectNew, ..ReceiverModel::new(Protocol::Adsb) };
        let r = run(&m, HarnessInput::Schedule(&flood(100.0, 1000, 10.0)), None).unwrap();
        assert_eq!((r.tracks_created, r.tracks_rejected, r.tracks_evicted), (100, 900, 0));
    }

    #[test]
    fn benign_spoof_is_ok() {
        let s = AttackScenario::new(Protocol::Adsb, AttackKind::Spoofing, 30.0).with_rate(40.0);
        let sched = gen_spoof(&s).unwrap().schedule.unwrap();
        let r = run(&ReceiverModel::new(Protocol::Adsb), HarnessInput::Schedule(&sched), None).unwrap();
        assert_eq!(r.verdict, Verdict::Ok);
        assert_eq!(r.messages_dropped, 0);
        assert_eq!(r.tracks_created, 1);
    }

    #[test]
    fn protocol_mismatch() {
        let m = ReceiverModel::new(Protocol::Ais);
        let e = run(&m, HarnessInput::Schedule(&flood(10.0, 5, 1.0)), None).unwrap_err();
        assert!(matches!(e, HarnessError::ProtocolMismatch { .. }));
    }

    #[test]
    fn tracks_expire_after_timeout() {
        let s = AttackScenario::new(Protocol::Adsb, AttackKind::Disappearance, 200.0);
        let out = crate::attack::gen_disappearance(&s, 10.0).unwrap();
        let m = ReceiverModel::new(Protocol::Adsb);
        let at = |w| run(&m, HarnessInput::Schedule(out.schedule()), Some(w)).unwrap();
        assert_eq!(at(69.0).tracks_active, 1);
        assert_eq!(at(71.0).tracks_active, 0);
    }

    #[test]
    fn alert_queue_overflows() {
        let s = AttackScenario::new(Protocol::Ais, AttackKind::OverwhelmingAlerts, 10.0).with_seed(2);
        let out = crate::attack::generate(&s).unwrap();
        let m = ReceiverModel { ownship: Some(s.kinematics()), ..ReceiverModel::new(Protocol::Ais) };
        let r = run(&m, HarnessInput::Schedule(out.schedule()), None).unwrap();
        assert_eq!(r.alerts_raised + r.alerts_dropped, 40);
        assert!(r.alerts_dropped > 0);
        assert!(r.alert_histogram.contains_key("collision"));
    }

    #[test]
    fn toml_model() {
        let m = ReceiverModel::from_toml("protocol = \"ais\"\ntrack_capacity = 5\neviction = \"reject_new\"").unwrap();
        assert_eq!(m.track_capacity, 5);
        assert_eq!(m.track_timeout(), 360.0);
        assert!(ReceiverModel::from_toml("protocol = \"ais\"\ntrack_capacity = 0").is_err());
        assert!(ReceiverModel::from_toml("protocol = \"ais\"\nbogus = 1").is_err());
    }

    #[test]
    fn fleet_fraction() {
        let sched = flood(600.0, 20, 5.0);
        let mut models = Vec::new();
        for i in 0..7 {
            let budget = if i < 3 { 300 } else { 1000 };
            models.push(ReceiverModel { per_second_budget: budget, ..ReceiverModel::new(Protocol::Adsb) });
        }
        let f = fleet_run(&models, &sched, None).unwrap();
        assert_eq!((f.affected, f.total), (3, 7));
        assert_eq!(f, fleet_run(&models, &sched, None).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn conservation_and_monotonicity(rate in 10.0f64..900.0, n in 1usize..200, budget in 1u32..800, seed in any::<u64>()) {
            let s = AttackScenario::new(Protocol::Adsb, AttackKind::Flooding, 3.0).with_rate(rate).with_seed(seed);
            let sched = gen_flood(&s, n).unwrap().schedule.unwrap();
            let m = ReceiverModel { per_second_budget: budget, ..ReceiverModel::new(Protocol::Adsb) };
            let a = run(&m, HarnessInput::Schedule(&sched), None).unwrap();
            prop_assert_eq!(a.decoded_count + a.crc_fail_count + a.messages_dropped, a.input_count);
            let more = ReceiverModel { per_second_budget: budget + 50, ..m.clone() };
            let b = run(&more, HarnessInput::Schedule(&sched), None).unwrap();
            prop_assert!(b.messages_dropped <= a.messages_dropped);
            prop_assert_eq!(&a, &run(&m, HarnessInput::Schedule(&sched), None).unwrap());
        }
    }
}
