//! Attack generators. Each is a pure function of its scenario.

use std::collections::{BTreeMap, HashSet};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fields::{self, RawValue};
use super::fuzz;
use super::motion::{self, offset_position, Kinematics, KT_TO_MPS};
use super::recon;
use super::{AirVariant, AttackError, AttackKind, AttackOutput, AttackScenario, TruthPoint};
use crate::adsb::{self, CprFormat, EmergencyState, KinematicState};
use crate::ais::air::{AirFrameOptions, TrainingPattern};
use crate::ais::{self, sixbit, VesselReport};
use crate::bits::Bits;
use crate::ccsds::sequence::{build_dos_sequence, Mutation};
use crate::ccsds::{self, PacketType, SpacePacket, MAX_SEQ_COUNT};
use crate::decode::TargetId;
use crate::epirb::{self, BeaconMessage, LocationScheme};
use crate::frame::{FrameSchedule, Protocol};
use crate::gdl90::{self, Heartbeat};
use crate::modem::{self, jam_waveform, JamKind, ModemConfig};

pub(crate) fn dispatch(s: &AttackScenario) -> Result<AttackOutput, AttackError> {
    use AttackKind::*;
    match s.attack {
        Spoofing => gen_spoof(s),
        Flooding => gen_flood(s, s.param_u64("n_targets", 1000)? as usize),
        Dos => gen_dos(s),
        Jamming => gen_jamming(s),
        Disappearance => gen_disappearance(s, s.param_f64("vanish_at", s.duration / 2.0)?),
        TrajectoryModification => {
            let o = LinearOffset::from_params(s)?;
            gen_trajectory_modification(s, &|t| o.at(t))
        }
        FalseEmergency => gen_false_emergency(s),
        MobAlert => gen_mob_alert(s),
        CollisionAlert => gen_collision_alert(s),
        InvalidEncoding => gen_invalid_encoding(s),
        CrcAttack => gen_crc_attack(s, CrcMode::from_params(s)?),
        Coordinated => gen_coordinated(s),
        PreambleTest => gen_preamble_test(s, &sweep_from_params(s)?),
        ErrorHandling => gen_error_handling(s),
        VisualDisruption => gen_visual_disruption(s),
        OverwhelmingAlerts => gen_overwhelming_alerts(s),
        Reconnaissance => gen_traffic_reconnaissance(s),
        Fuzzing => gen_fuzzing(s),
        Replay => gen_replay(s),
    }
}

/// Whole frames in `duration` at `rate`.
pub fn frame_count(rate: f64, duration: f64) -> u64 {
    (rate * duration + 1e-9).floor() as u64
}

fn us(t: f64) -> u64 {
    (t * 1e6).round() as u64
}

fn param_err(name: &str, msg: impl Into<String>) -> AttackError {
    AttackError::Param { name: name.into(), msg: msg.into() }
}

type OffsetFn<'a> = &'a dyn Fn(f64) -> (f64, f64);

fn state_at(k: &Kinematics, t: f64, offset: OffsetFn) -> KinematicState {
    let mut st = k.at(t);
    let (e, n) = offset(t);
    if e != 0.0 || n != 0.0 {
        (st.latitude, st.longitude) = offset_position(st.latitude, st.longitude, e, n);
    }
    st
}

fn truth(t: f64, id: TargetId, st: &KinematicState, alt: bool) -> TruthPoint {
    TruthPoint {
        timestamp_us: us(t),
        id,
        latitude: st.latitude,
        longitude: st.longitude,
        altitude_ft: alt.then_some(st.altitude_ft),
    }
}

// ---------------------------------------------------------------------------
// Per-protocol tracks

/// Position frames at `rate` alternating even/odd, velocity half a period
/// later, identification every `ident_interval` seconds.
fn adsb_track(
    sched: &mut FrameSchedule,
    truths: &mut Vec<TruthPoint>,
    icao: u32,
    k: &Kinematics,
    rate: f64,
    duration: f64,
    ident_interval: f64,
    offset: OffsetFn,
) -> Result<(), AttackError> {
    let n = frame_count(rate, duration);
    for i in 0..n {
        let t = i as f64 / rate;
        let st = state_at(k, t, offset);
        let fmt = if i % 2 == 0 { CprFormat::Even } else { CprFormat::Odd };
        sched.push(us(t), 0, adsb::encode_airborne_position(icao, &st, fmt)?.to_bits());
        truths.push(truth(t, TargetId::Icao(icao), &st, true));
        let tv = (i as f64 + 0.5) / rate;
        if tv < duration {
            sched.push(us(tv), 0, adsb::encode_velocity(icao, &state_at(k, tv, offset))?.to_bits());
        }
    }
    let mut j = 0;
    loop {
        let t = j as f64 * ident_interval + 0.25 / rate;
        if t >= duration {
            break;
        }
        sched.push(us(t), 0, adsb::encode_identification(icao, &k.callsign)?.to_bits());
        j += 1;
    }
    Ok(())
}

fn ais_report(mmsi: u32, st: &KinematicState, nav_status: u8) -> Result<Bits, AttackError> {
    let r = VesselReport {
        mmsi,
        lat: Some(st.latitude),
        lon: Some(st.longitude),
        sog_kt: Some(st.ground_speed_kt),
        cog_deg: Some(st.track_deg),
        heading: Some(st.track_deg.round() as u16 % 360),
        nav_status,
    };
    Ok(ais::encode_position_report(&r)?.to_bits())
}

fn ais_track(
    sched: &mut FrameSchedule,
    truths: &mut Vec<TruthPoint>,
    mmsi: u32,
    k: &Kinematics,
    rate: f64,
    duration: f64,
    nav_status: u8,
    offset: OffsetFn,
) -> Result<(), AttackError> {
    for i in 0..frame_count(rate, duration) {
        let t = i as f64 / rate;
        let st = state_at(k, t, offset);
        sched.push(us(t), 0, ais_report(mmsi, &st, nav_status)?);
        truths.push(truth(t, TargetId::Mmsi(mmsi), &st, false));
    }
    Ok(())
}

/// Beacon described by the `beacon`, `scheme`, `country`, `serial`, `cert`
/// and `beacon_number` params.
pub fn beacon_for(s: &AttackScenario, k: &Kinematics, position: Option<(f64, f64)>) -> Result<BeaconMessage, AttackError> {
    let country = s.param_u64("country", (k.mmsi / 1_000_000) as u64)? as u16;
    let mut m = match s.param_str("beacon", "maritime")? {
        "maritime" | "epirb" => BeaconMessage::maritime(k.mmsi, s.param_u64("beacon_number", 1)? as u8, position),
        "elt" | "aviation" => BeaconMessage::elt(country, k.icao24, position),
        "plb" | "personal" => BeaconMessage::plb(
            country,
            s.param_u64("serial", 12_345)? as u32,
            s.param_u64("cert", 100)? as u16,
            position,
        ),
        other => return Err(param_err("beacon", format!("{other:?}: expected maritime, elt or plb"))),
    };
    m.scheme = match s.param_str("scheme", "user")? {
        "user" => LocationScheme::User,
        "standard" => LocationScheme::Standard,
        other => return Err(param_err("scheme", format!("{other:?}: expected user or standard"))),
    };
    m.self_test = s.param_bool("self_test", false)?;
    Ok(m)
}

fn epirb_track(
    s: &AttackScenario,
    sched: &mut FrameSchedule,
    truths: &mut Vec<TruthPoint>,
    k: &Kinematics,
    rate: f64,
    offset: OffsetFn,
) -> Result<(), AttackError> {
    for i in 0..frame_count(rate, s.duration) {
        let t = i as f64 / rate;
        let st = state_at(k, t, offset);
        let bits = epirb::encode_beacon(&beacon_for(s, k, Some((st.latitude, st.longitude)))?)?;
        let id = TargetId::Beacon(epirb::hex_id(&bits).unwrap_or_default());
        sched.push(us(t), 0, bits);
        truths.push(truth(t, id, &st, false));
    }
    Ok(())
}

fn framed(m: &gdl90::Gdl90Message) -> Bits {
    Bits::from_bytes(&gdl90::frame(m))
}

fn heartbeat(second: u32) -> gdl90::Gdl90Message {
    Heartbeat {
        status1: Heartbeat::GPS_VALID | Heartbeat::UAT_INITIALIZED,
        status2: Heartbeat::UTC_OK,
        timestamp: second % 86_400,
        uplink_count: 0,
        basic_long_count: 1,
    }
    .to_message()
}

/// Heartbeat every second plus traffic reports at `rate`.
fn gdl90_track(
    sched: &mut FrameSchedule,
    truths: &mut Vec<TruthPoint>,
    k: &Kinematics,
    rate: f64,
    duration: f64,
    offset: OffsetFn,
) -> Result<(), AttackError> {
    let mut j = 0u32;
    while (j as f64) < duration {
        sched.push(us(j as f64), 0, framed(&heartbeat(j)));
        j += 1;
    }
    for i in 0..frame_count(rate, duration) {
        let t = i as f64 / rate;
        let st = state_at(k, t, offset);
        sched.push(us(t), 0, framed(&gdl90::encode_traffic_report(k.icao24, &st)?));
        truths.push(truth(t, TargetId::Address(k.icao24), &st, true));
    }
    Ok(())
}

/// Template packet from the `apid`, `seq`, `payload_hex` and `packet_type`
/// params.
pub fn ccsds_template(s: &AttackScenario) -> Result<SpacePacket, AttackError> {
    let apid = s.param_u64("apid", 100)?;
    let seq = s.param_u64("seq", 0)?;
    let payload = hex::decode(s.param_str("payload_hex", "C0FFEE00")?)
        .map_err(|e| param_err("payload_hex", e.to_string()))?;
    let mut p = SpacePacket::telecommand(apid as u16, seq as u16, payload);
    if apid > ccsds::MAX_APID as u64 || seq > MAX_SEQ_COUNT as u64 {
        return Err(param_err("apid/seq", "exceeds the header field width"));
    }
    p.packet_type = match s.param_str("packet_type", "tc")? {
        "tc" | "telecommand" => PacketType::Telecommand,
        "tm" | "telemetry" => PacketType::Telemetry,
        other => return Err(param_err("packet_type", format!("{other:?}: expected tc or tm"))),
    };
    ccsds::encode_packet(&p)?;
    Ok(p)
}

fn ccsds_stream(s: &AttackScenario, sched: &mut FrameSchedule, rate: f64) -> Result<(), AttackError> {
    let tpl = ccsds_template(s)?;
    for i in 0..frame_count(rate, s.duration) {
        let p = SpacePacket { seq_count: ((tpl.seq_count as u64 + i) & MAX_SEQ_COUNT as u64) as u16, ..tpl.clone() };
        sched.push(us(i as f64 / rate), 0, Bits::from_bytes(&ccsds::encode_packet(&p)?));
    }
    Ok(())
}

fn spoof_with_offset(s: &AttackScenario, offset: OffsetFn) -> Result<AttackOutput, AttackError> {
    let k = s.kinematics();
    let rate = s.rate();
    let mut sched = FrameSchedule::new(s.protocol);
    let mut truths = Vec::new();
    match s.protocol {
        Protocol::Adsb => {
            let ident = s.param_f64("ident_interval_s", 5.0)?;
            if ident <= 0.0 {
                return Err(param_err("ident_interval_s", "must be > 0"));
            }
            adsb_track(&mut sched, &mut truths, k.icao24, &k, rate, s.duration, ident, offset)?
        }
        Protocol::Ais => {
            let nav = s.param_u64("nav_status", 0)? as u8;
            ais_track(&mut sched, &mut truths, k.mmsi, &k, rate, s.duration, nav, offset)?
        }
        Protocol::Epirb => epirb_track(s, &mut sched, &mut truths, &k, rate, offset)?,
        Protocol::Gdl90 => gdl90_track(&mut sched, &mut truths, &k, rate, s.duration, offset)?,
        Protocol::Ccsds => ccsds_stream(s, &mut sched, rate)?,
    }
    sched.sort();
    Ok(AttackOutput { schedule: Some(sched), truth: truths, ..Default::default() })
}

// ---------------------------------------------------------------------------
// Generators

/// One target moving under the motion model.
pub fn gen_spoof(s: &AttackScenario) -> Result<AttackOutput, AttackError> {
    spoof_with_offset(s, &|_| (0.0, 0.0))
}

/// `n` distinct values in `lo..=hi`, in draw order.
fn distinct(rng: &mut ChaCha8Rng, n: usize, lo: u32, hi: u32) -> Result<Vec<u32>, AttackError> {
    if n as u64 > (hi - lo) as u64 + 1 {
        return Err(param_err("n_targets", format!("at most {} distinct identities", hi - lo + 1)));
    }
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = rng.gen_range(lo..=hi);
        if seen.insert(v) {
            out.push(v);
        }
    }
    Ok(out)
}

struct Target {
    id: u32,
    kin: Kinematics,
}

fn random_targets(s: &AttackScenario, rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Target>, AttackError> {
    let (lo, hi) = match s.protocol {
        Protocol::Adsb | Protocol::Gdl90 => (1, 0xFF_FFFF),
        Protocol::Ais | Protocol::Epirb => (201_000_000, 775_999_999),
        Protocol::Ccsds => (0, ccsds::MAX_APID as u32 - 1),
    };
    let ids = distinct(rng, n, lo, hi)?;
    let k = s.kinematics();
    let spread = s.param_f64("spread_deg", 0.5)?.abs();
    let air = matches!(s.protocol, Protocol::Adsb | Protocol::Gdl90);
    Ok(ids
        .into_iter()
        .map(|id| {
            let kin = Kinematics {
                icao24: id,
                mmsi: id,
                latitude: (k.latitude + rng.gen_range(-spread..=spread)).clamp(-85.0, 85.0),
                longitude: motion::wrap_lon(k.longitude + rng.gen_range(-spread..=spread)),
                altitude_ft: if air { (rng.gen_range(10..400) * 100) as f64 } else { 0.0 },
                ground_speed_kt: if air { rng.gen_range(120.0..450.0) } else { rng.gen_range(0.0..20.0) },
                track_deg: rng.gen_range(0.0..360.0),
                callsign: String::new(),
                turn_rate_deg_s: 0.0,
                vertical_rate_fpm: 0.0,
            };
            Target { id, kin }
        })
        .collect())
}

/// `n_targets` distinct identities drawn from the seed, round-robin at the
/// scenario's aggregate rate.
pub fn gen_flood(s: &AttackScenario, n_targets: usize) -> Result<AttackOutput, AttackError> {
    if n_targets == 0 {
        return Err(param_err("n_targets", "must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let targets = random_targets(s, &mut rng, n_targets)?;
    let rate = s.rate();
    let mut sched = FrameSchedule::new(s.protocol);
    let mut truths = Vec::new();
    let none: OffsetFn = &|_| (0.0, 0.0);
    let payload = ccsds_template(s)?.payload;
    for i in 0..frame_count(rate, s.duration) {
        let t = i as f64 / rate;
        let round = i / n_targets as u64;
        let tg = &targets[(i % n_targets as u64) as usize];
        let st = state_at(&tg.kin, t, none);
        let (bits, id, alt) = match s.protocol {
            Protocol::Adsb => {
                let fmt = if round.is_multiple_of(2) { CprFormat::Even } else { CprFormat::Odd };
                (adsb::encode_airborne_position(tg.id, &st, fmt)?.to_bits(), TargetId::Icao(tg.id), true)
            }
            Protocol::Ais => (ais_report(tg.id, &st, 0)?, TargetId::Mmsi(tg.id), false),
            Protocol::Epirb => {
                let b = epirb::encode_beacon(&BeaconMessage::maritime(tg.id, 1, Some((st.latitude, st.longitude))))?;
                let id = TargetId::Beacon(epirb::hex_id(&b).unwrap_or_default());
                (b, id, false)
            }
            Protocol::Gdl90 => (framed(&gdl90::encode_traffic_report(tg.id, &st)?), TargetId::Address(tg.id), true),
            Protocol::Ccsds => {
                let p = SpacePacket::telecommand(tg.id as u16, (round & MAX_SEQ_COUNT as u64) as u16, payload.clone());
                (Bits::from_bytes(&ccsds::encode_packet(&p)?), TargetId::Apid(tg.id as u16), false)
            }
        };
        sched.push(us(t), 0, bits);
        if s.protocol != Protocol::Ccsds {
            truths.push(truth(t, id, &st, alt));
        }
    }
    Ok(AttackOutput { schedule: Some(sched), truth: truths, ..Default::default() })
}

/// High-rate flood (default 50 identities at 1000 msg/s); for CCSDS the
/// malformed-sequence builder with the `mutations` param.
pub fn gen_dos(s: &AttackScenario) -> Result<AttackOutput, AttackError> {
    if s.protocol != Protocol::Ccsds {
        return gen_flood(s, s.param_u64("n_targets", 50)? as usize);
    }
    let names = s.param_list_str("mutations")?.unwrap_or_else(|| {
        ["flood*50", "seq_jump", "length_mismatch", "bad_version", "truncate", "oversize", "random_payload", "replay*5"]
            .map(String::from)
            .to_vec()
    });
    let muts = names
        .iter()
        .map(|n| n.parse::<Mutation>().map_err(|e| param_err("mutations", e)))
        .collect::<Result<Vec<_>, _>>()?;
    let seq = build_dos_sequence(&ccsds_template(s)?, &muts, s.seed);
    Ok(AttackOutput::from_schedule(seq.to_schedule()))
}

/// Jamming waveform selected by the `waveform` param: gaussian_noise,
/// cw_tone (`offset_hz`) or swept_tone (`f0_hz`, `f1_hz`).
pub fn gen_jamming(s: &AttackScenario) -> Result<AttackOutput, AttackError> {
    let default_rate = ModemConfig::default().sample_rate(s.protocol)?;
    let rate = s.param_f64("sample_rate", default_rate)?;
    let kind = match s.param_str("waveform", "gaussian_noise")? {
        "gaussian_noise" | "noise" => JamKind::GaussianNoise,
        "cw_tone" | "cw" => JamKind::CwTone { offset_hz: s.param_f64("offset_hz", 0.0)? },
        "swept_tone" | "sweep" | "chirp" => JamKind::SweptTone {
            f0_hz: s.param_f64("f0_hz", -rate / 4.0)?,
            f1_hz: s.param_f64("f1_hz", rate / 4.0)?,
        },
        other => return Err(param_err("waveform", format!("{other:?}: expected gaussian_noise, cw_tone or swept_tone"))),
    };
    let peak = s.param_f64("peak", 1.0)? as f32;
    let mut iq = jam_waveform(kind, s.duration, rate, peak, s.seed);
    iq.center_freq_label = modem::center_freq(s.protocol);
    Ok(AttackOutput { schedule: Some(FrameSchedule::new(s.protocol)), iq: Some(iq), ..Default::default() })
}

/// Normal spoof until `vanish_at` seconds, then silence.
pub fn gen_disappearance(s: &AttackScenario, vanish_at: f64) -> Result<AttackOutput, AttackError> {
    if !(vanish_at >= 0.0) {
        return Err(param_err("vanish_at", "must be >= 0"));
    }
    let mut out = gen_spoof(s)?;
    let cut = us(vanish_at);
    if let Some(sched) = out.schedule.as_mut() {
        sched.entries.retain(|e| e.timestamp_us < cut);
    }
    out.truth.retain(|t| t.timestamp_us < cut);
    Ok(out)
}

/// Offset `c + d·t` in metres east/north.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LinearOffset {
    pub east_m: f64,
    pub north_m: f64,
    pub drift_east_mps: f64,
    pub drift_north_mps: f64,
}

impl LinearOffset {
    pub fn from_params(s: &AttackScenario) -> Result<Self, AttackError> {
        Ok(LinearOffset {
            east_m: s.param_f64("offset_east_m", 0.0)?,
            north_m: s.param_f64("offset_north_m", 0.0)?,
            drift_east_mps: s.param_f64("drift_east_mps", 0.0)?,
            drift_north_mps: s.param_f64("drift_north_mps", 0.0)?,
        })
    }

    pub fn at(&self, t: f64) -> (f64, f64) {
        (self.east_m + self.drift_east_mps * t, self.north_m + self.drift_north_mps * t)
    }
}

/// The true trajectory perturbed by `offset(t)` = (east m, north m),
/// converted to degrees at the target's latitude.
pub fn gen_trajectory_modification(s: &AttackScenario, offset: OffsetFn) -> Result<AttackOutput, AttackError> {
    spoof_with_offset(s, offset)
}

pub fn parse_emergency(name: &str) -> Result<EmergencyState, AttackError> {
    use EmergencyState::*;
    Ok(match name {
        "general" => General,
        "medical" => Medical,
        "minimum_fuel" => MinimumFuel,
        "no_communications" => NoCommunications,
        "unlawful_interference" => UnlawfulInterference,
        "downed_aircraft" => DownedAircraft,
        other => return Err(param_err("emergency", format!("unknown emergency {other:?}"))),
    })
}

/// ADS-B spoof with type-code 28 emergency status interleaved, one every
/// `emergency_interval_s` (default 1 s).
pub fn gen_false_emergency(s: &AttackScenario) -> Result<AttackOutput, AttackError> {
    if s.protocol != Protocol::Adsb {
        return Err(AttackError::Invalid("false_emergency is ADS-B; use mob_alert or collision_alert for AIS".into()));
    }
    let emergency = parse_emergency(s.param_str("emergency", "general")?)?;
    let interval = s.param_f64("emergency_interval_s", 1.0)?;
    if interval <= 0.0 {
        return Err(param_err("emergency_interval_s", "must be > 0"));
    }
    let mut out = gen_spoof(s)?;
    let icao = s.kinematics().icao24;
    let frame = adsb::encode_emergency(icao, emergency)?.to_bits();
    let sched = out.schedule.as_mut().expect("spoof schedule");
    let lead = 0.75 / s.rate();
    let mut j = 0;
    loop {
        let t = j as f64 * interval + lead;
        if t >= s.duration {
            break;
        }
        sched.push(us(t), 0, frame.clone());
        j += 1;
    }
    sched.sort();
    Ok(out)
}

/// Man-overboard device: position reports with nav status 14 plus a type-14
/// broadcast (`text`, default "MAN OVERBOARD") every `alert_interval_s`.
pub fn gen_mob_alert(s: &AttackScenario) -> Result<AttackOutput, AttackError> {
    let k = s.kinematics();
    let mmsi = s.param_u64("mob_mmsi", 972_012_345)? as u32;
    let text = s.param_str("text", "MAN OVERBOARD")?;
    let interval = s.param_f64("alert_interval_s", 10.0)?;
    if interval <= 0.0 {
        return Err(param_err("alert_interval_s", "must be > 0"));
    }
    let mut sched = FrameSchedule::new(Protocol::Ais);
    let mut truths = Vec::new();
    ais_track(&mut sched, &mut truths, mmsi, &k, s.rate(), s.duration, 14, &|_| (0.0, 0.0))?;
    let msg = ais::encode_safety_broadcast(mmsi, text)?.to_bits();
    let lead = (0.5f64).min(s.duration / 2.0);
    let mut j = 0;
    loop {
        let t = j as f64 * interval + lead;
        if t >= s.duration {
            break;
        }
        sched.push(us(t), 0, msg.clone());
        j += 1;
    }
    sched.sort();
    Ok(AttackOutput { schedule: Some(sched), truth: truths, ..Default::default() })
}

/// Straight-line intruder whose closest point of approach to the ownship is
/// `cpa_m` at `tcpa_s`. Positions are local east/north metres from the
/// ownship's initial position.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionGeometry {
    pub own: Kinematics,
    pub cpa_m: f64,
    pub tcpa_s: f64,
    /// Intruder velocity (east, north) in m/s.
    pub velocity: (f64, f64),
    /// Intruder position at `tcpa_s`.
    pub at_tcpa: (f64, f64),
}

impl CollisionGeometry {
    /// Relative velocity of `closing_kt` toward bearing `bearing_deg`; the
    /// intruder passes `cpa_m` to the left of that direction.
    pub fn new(own: &Kinematics, cpa_m: f64, tcpa_s: f64, closing_kt: f64, bearing_deg: f64) -> Self {
        let v_own = own_velocity(own);
        let b = bearing_deg.to_radians();
        let u = (b.sin(), b.cos());
        let v_rel = (closing_kt * KT_TO_MPS * u.0, closing_kt * KT_TO_MPS * u.1);
        let perp = (-u.1, u.0);
        let own_t = (v_own.0 * tcpa_s, v_own.1 * tcpa_s);
        CollisionGeometry {
            own: own.clone(),
            cpa_m,
            tcpa_s,
            velocity: (v_own.0 + v_rel.0, v_own.1 + v_rel.1),
            at_tcpa: (own_t.0 + cpa_m * perp.0, own_t.1 + cpa_m * perp.1),
        }
    }

    pub fn intruder_en(&self, t: f64) -> (f64, f64) {
        let dt = t - self.tcpa_s;
        (self.at_tcpa.0 + self.velocity.0 * dt, self.at_tcpa.1 + self.velocity.1 * dt)
    }

    pub fn own_en(&self, t: f64) -> (f64, f64) {
        let v = own_velocity(&self.own);
        (v.0 * t, v.1 * t)
    }

    pub fn intruder_latlon(&self, t: f64) -> (f64, f64) {
        let (e, n) = self.intruder_en(t);
        offset_position(self.own.latitude, self.own.longitude, e, n)
    }

    pub fn intruder_sog_kt(&self) -> f64 {
        self.velocity.0.hypot(self.velocity.1) / KT_TO_MPS
    }

    pub fn intruder_cog_deg(&self) -> f64 {
        self.velocity.0.atan2(self.velocity.1).to_degrees().rem_euclid(360.0)
    }
}

fn own_velocity(own: &Kinematics) -> (f64, f64) {
    let v = own.ground_speed_kt * KT_TO_MPS;
    let h = own.track_deg.to_radians();
    (v * h.sin(), v * h.cos())
}

/// Closest point of approach `(distance m, time s)` of two constant-velocity
/// tracks given relative position and velocity; the time is clamped at 0.
pub fn cpa(rel_pos: (f64, f64), rel_vel: (f64, f64)) -> (f64, f64) {
    let vv = rel_vel.0 * rel_vel.0 + rel_vel.1 * rel_vel.1;
    let t = if vv < 1e-12 { 0.0 } else { (-(rel_pos.0 * rel_vel.0 + rel_pos.1 * rel_vel.1) / vv).max(0.0) };
    ((rel_pos.0 + rel_vel.0 * t).hypot(rel_pos.1 + rel_vel.1 * t), t)
}

pub fn collision_geometry(s: &AttackScenario) -> Result<CollisionGeometry, AttackError> {
    let own = s.kinematics();
    if own.turn_rate_deg_s != 0.0 {
        return Err(AttackError::Invalid("collision geometry needs a straight-line ownship".into()));
    }
    let g = CollisionGeometry::new(
        &own,
        s.param_f64("cpa_m", 100.0)?,
        s.param_f64("tcpa_s", s.duration / 2.0)?,
        s.param_f64("closing_kt", 15.0)?,
        s.param_f64("bearing_deg", (own.track_deg + 270.0) % 360.0)?,
    );
    if g.intruder_sog_kt() > 102.2 {
        return Err(ais::AisError::Speed(g.intruder_sog_kt()).into());
    }
    Ok(g)
}

fn intruder_report(g: &CollisionGeometry, mmsi: u32, t: f64) -> Result<(Bits, KinematicState), AttackError> {
    let (lat, lon) = g.intruder_latlon(t);
    let st = KinematicState {
        latitude: lat,
        longitude: lon,
        ground_speed_kt: g.intruder_sog_kt(),
        track_deg: g.intruder_cog_deg(),
        ..KinematicState::default()
    };
    Ok((ais_report(mmsi, &st, 0)?, st))
}

/// Intruder reports on a collision course with the ownship in `kinematics`.
pub fn gen_collision_alert(s: &AttackScenario) -> Result<AttackOutput, AttackError> {
    let g = collision_geometry(s)?;
    let mmsi = s.param_u64("intruder_mmsi", (g.own.mmsi as u64 + 1) % 1_000_000_000)? as u32;
    let rate = s.rate();
    let mut sched = FrameSchedule::new(Protocol::Ais);
    let mut truths = Vec::new();
    for i in 0..frame_count(rate, s.duration) {
        let t = i as f64 / rate;
        let (bits, st) = intruder_report(&g, mmsi, t)?;
        sched.push(us(t), 0, bits);
        truths.push(truth(t, TargetId::Mmsi(mmsi), &st, false));
    }
    Ok(AttackOutput { schedule: Some(sched), truth: truths, ..Default::default() })
}

/// Spoof frames rewritten through `raw_overrides`, checksums recomputed.
/// Only frames that carry at least one overridden field are kept.
pub fn gen_invalid_encoding(s: &AttackScenario) -> Result<AttackOutput, AttackError> {
    if s.raw_overrides.is_empty() {
        return Err(AttackError::Override("invalid_encoding needs a [raw_overrides] table".into()));
    }
    let base = gen_spoof(s)?;
    let sched = rewrite(base.schedule(), &s.raw_overrides)?;
    if sched.is_empty() {
        let names: Vec<_> = s.raw_overrides.keys().cloned().collect();
        return Err(AttackError::Override(format!("no generated frame carries {}", names.join(", "))));
    }
    Ok(AttackOutput::from_schedule(sched))
}

fn rewrite(base: &FrameSchedule, overrides: &BTreeMap<String, RawValue>) -> Result<FrameSchedule, AttackError> {
    let mut out = FrameSchedule { entries: Vec::new(), ..base.clone() };
    for e in &base.entries {
        if let Some(bits) = fields::override_frame(base.protocol, &e.frame.bits, overrides)? {
            out.push(e.timestamp_us, e.transmitter, bits);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrcMode {
    /// Flip `k` seed-chosen bits per frame.
    FlipBits(usize),
    /// Apply raw overrides (default: type code 0), then fix the checksum.
    ValidCrcBadFields,
    /// Zero the parity / BCH fields.
    ZeroParity,
}

impl CrcMode {
    pub fn from_params(s: &AttackScenario) -> Result<Self, AttackError> {
        Ok(match s.param_str("mode", "flip_bits")? {
            "flip_bits" => CrcMode::FlipBits(s.param_u64("k", 1)? as usize),
            "valid_crc_bad_fields" => CrcMode::ValidCrcBadFields,
            "zero_parity" => CrcMode::ZeroParity,
            other => {
                return Err(param_err("mode", format!("{other:?}: expected flip_bits, valid_crc_bad_fields or zero_parity")))
            }
        })
    }
}

/// Spoof frames corrupted per `mode`.
pub fn gen_crc_attack(s: &AttackScenario, mode: CrcMode) -> Result<AttackOutput, AttackError> {
    let base = gen_spoof(s)?;
    let base = base.schedule();
    let p = base.protocol;
    match mode {
        CrcMode::FlipBits(k) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            let mut out = base.clone();
            for e in &mut out.entries {
                let n = e.frame.bits.len();
                if k > n {
                    return Err(param_err("k", format!("cannot flip {k} of {n} bits")));
                }
                for i in index::sample(&mut rng, n, k) {
                    e.frame.bits[i] = !e.frame.bits[i];
                }
            }
            Ok(AttackOutput::from_schedule(out))
        }
        CrcMode::ValidCrcBadFields => {
            let mut o = s.raw_overrides.clone();
            if o.is_empty() {
                o.insert(if p == Protocol::Ais { "msg_type" } else { "tc" }.into(), RawValue::Int(0));
            }
            Ok(AttackOutput::from_schedule(rewrite(base, &o)?))
        }
        CrcMode::ZeroParity => {
            let mut out = base.clone();
            for e in &mut out.entries {
                match p {
                    Protocol::Adsb => e.frame.bits.set_uint(88, 24, 0),
                    Protocol::Epirb => {
                        e.frame.bits.set_uint(85, 21, 0);
                        e.frame.bits.set_uint(132, 12, 0);
                    }
                    _ => return Err(AttackError::Invalid(format!("zero_parity has no meaning for {p}"))),
                }
            }
            Ok(AttackOutput::from_schedule(out))
        }
    }
}

/// One target's frames dealt round-robin over `transmitters`, each shifted
/// by its entry in the `offsets_us` param (default all zero).
pub fn gen_coordinated(s: &AttackScenario) -> Result<AttackOutput, AttackError> {
    let t = s.transmitters as usize;
    let offsets = match s.param_list_i64("offsets_us")? {
        None => vec![0u64; t],
        Some(v) if v.len() == t && v.iter().all(|&o| o >= 0) => v.into_iter().map(|o| o as u64).collect(),
        Some(v) => return Err(param_err("offsets_us", format!("need {t} non-negative values, got {v:?}"))),
    };
    let mut out = gen_spoof(s)?;
    let base = out.schedule.take().expect("spoof schedule");
    let mut sched = FrameSchedule::new(s.protocol);
    sched.transmitters = s.transmitters;
    for (i, e) in base.entries.into_iter().enumerate() {
        let tx = i % t;
        sched.push(e.timestamp_us + offsets[tx], tx as u32, e.frame.bits);
    }
    sched.sort();
    out.schedule = Some(sched);
    Ok(out)
}

/// Training-pattern sweep from the `lengths` param (both phases per length),
/// or the default sweep.
pub fn sweep_from_params(s: &AttackScenario) -> Result<Vec<TrainingPattern>, AttackError> {
    let Some(lengths) = s.param_list_i64("lengths")? else { return Ok(TrainingPattern::default_sweep()) };
    let mut v = Vec::new();
    for l in lengths {
        if !(0..=crate::ais::air::MAX_TRAINING_BITS as i64).contains(&l) {
            return Err(param_err("lengths", format!("training length {l} out of range")));
        }
        v.push(TrainingPattern { length: l as usize, inverted: false });
        if l > 0 {
            v.push(TrainingPattern { length: l as usize, inverted: true });
        }
    }
    Ok(v)
}

fn training_label(p: &TrainingPattern) -> String {
    format!("training={} {}", p.length, if p.inverted { "inverted" } else { "normal" })
}

/// The same position report once per training pattern, `1/rate` apart.
pub fn gen_preamble_test(s: &AttackScenario, sweep: &[TrainingPattern]) -> Result<AttackOutput, AttackError> {
    let k = s.kinematics();
    let payload = ais_report(k.mmsi, &k.at(0.0), 0)?;
    let rate = s.rate();
    let mut out = AttackOutput::default();
    let mut sched = FrameSchedule::new(Protocol::Ais);
    for (i, p) in sweep.iter().enumerate() {
        sched.push(us(i as f64 / rate), 0, payload.clone());
        out.air_variants.push(AirVariant {
            label: training_label(p),
            options: AirFrameOptions { training: *p, ..AirFrameOptions::default() },
        });
    }
    out.schedule = Some(sched);
    Ok(out)
}

/// Malformed-at-every-layer AIS set: broken FCS, missing stuffing, missing
/// training, truncated and oversized payloads, unknown type, sentinel misuse.
pub fn gen_error_handling(s: &AttackScenario) -> Result<AttackOutput, AttackError> {
    let k = s.kinematics();
    let good = ais_report(k.mmsi, &k.at(0.0), 0)?;
    let d = AirFrameOptions::default();
    let mut unknown = good.clone();
    unknown.set_uint(0, 6, 63);
    let mut sentinel = good.clone();
    sentinel.set_uint(89, 27, ais::LAT_UNAVAILABLE as u64);
    let mut long_text = Bits::new();
    long_text.push_uint(14, 6);
    long_text.push_uint(0, 2);
    long_text.push_uint(k.mmsi as u64, 30);
    long_text.push_uint(0, 2);
    for c in "OVERSIZED SAFETY TEXT ".repeat(9).chars() {
        long_text.push_uint(sixbit::text_code(c).unwrap_or(0) as u64, 6);
    }
    let cases: Vec<(&str, Bits, AirFrameOptions)> = vec![
        ("valid", good.clone(), d),
        ("fcs_inverted", good.clone(), AirFrameOptions { invert_crc: true, ..d }),
        ("no_stuffing", good.clone(), AirFrameOptions { omit_stuffing: true, ..d }),
        ("no_training", good.clone(), AirFrameOptions { training: TrainingPattern { length: 0, inverted: false }, ..d }),
        ("no_buffer", good.clone(), AirFrameOptions { buffer_bits: 0, ..d }),
        ("truncated_payload", Bits::from_bools(good[..160].to_vec()), d),
        ("unknown_type", unknown, d),
        ("lat_sentinel_misuse", sentinel, d),
        ("oversized_text", long_text, d),
    ];
    let rate = s.rate();
    let mut out = AttackOutput::default();
    let mut sched = FrameSchedule::new(Protocol::Ais);
    for (i, (label, bits, opts)) in cases.into_iter().enumerate() {
        sched.push(us(i as f64 / rate), 0, bits);
        out.air_variants.push(AirVariant { label: label.into(), options: opts });
    }
    out.schedule = Some(sched);
    Ok(out)
}

/// Geometric flood: `n_ghosts` stationary vessels on a ring (or grid) of
/// `radius_m` around the kinematics position, reporting round-robin.
pub fn gen_visual_disruption(s: &AttackScenario) -> Result<AttackOutput, AttackError> {
    let k = s.kinematics();
    let n = s.param_u64("n_ghosts", 24)? as usize;
    if n == 0 {
        return Err(param_err("n_ghosts", "must be >= 1"));
    }
    let r = s.param_f64("radius_m", 1852.0)?;
    let layout = s.param_str("layout", "ring")?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let ids = distinct(&mut rng, n, 201_000_000, 775_999_999)?;
    let side = (n as f64).sqrt().ceil() as usize;
    let ghosts: Vec<(u32, f64, f64)> = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| {
            let (e, no) = match layout {
                "grid" => {
                    let c = (side as f64 - 1.0) / 2.0;
                    ((i % side) as f64 - c, (i / side) as f64 - c)
                }
                _ => {
                    let a = std::f64::consts::TAU * i as f64 / n as f64;
                    (a.sin(), a.cos())
                }
            };
            let (lat, lon) = offset_position(k.latitude, k.longitude, e * r, no * r);
            (id, lat, lon)
        })
        .collect();
    if !matches!(layout, "ring" | "grid") {
        return Err(param_err("layout", format!("{layout:?}: expected ring or grid")));
    }
    let rate = s.rate();
    let mut sched = FrameSchedule::new(Protocol::Ais);
    let mut truths = Vec::new();
    for i in 0..frame_count(rate, s.duration) {
        let t = i as f64 / rate;
        let (id, lat, lon) = ghosts[(i % n as u64) as usize];
        let st = KinematicState { latitude: lat, longitude: lon, ..KinematicState::default() };
        let r = VesselReport { mmsi: id, lat: Some(lat), lon: Some(lon), sog_kt: Some(0.0), ..VesselReport::default() };
        sched.push(us(t), 0, ais::encode_position_report(&r)?.to_bits());
        truths.push(truth(t, TargetId::Mmsi(id), &st, false));
    }
    Ok(AttackOutput { schedule: Some(sched), truth: truths, ..Default::default() })
}

/// `n_alerts` type-14 broadcasts from distinct MMSIs mixed with
/// `n_collision` intruders on collision courses, round-robin.
pub fn gen_overwhelming_alerts(s: &AttackScenario) -> Result<AttackOutput, AttackError> {
    let k = s.kinematics();
    let n_alerts = s.param_u64("n_alerts", 30)? as usize;
    let n_coll = s.param_u64("n_collision", 10)? as usize;
    if n_alerts + n_coll == 0 {
        return Err(param_err("n_alerts", "need at least one alert source"));
    }
    let text = s.param_str("text", "COLLISION WARNING")?;
    let tcpa = s.param_f64("tcpa_s", 120.0)?;
    let cpa_m = s.param_f64("cpa_m", 50.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let ids = distinct(&mut rng, n_alerts + n_coll, 201_000_000, 775_999_999)?;
    let texts = ids[..n_alerts]
        .iter()
        .map(|&m| Ok(ais::encode_safety_broadcast(m, text)?.to_bits()))
        .collect::<Result<Vec<_>, AttackError>>()?;
    let geoms: Vec<CollisionGeometry> = (0..n_coll)
        .map(|j| CollisionGeometry::new(&k, cpa_m, tcpa, 15.0, 360.0 * j as f64 / n_coll.max(1) as f64))
        .collect();
    let rate = s.rate();
    let total = (n_alerts + n_coll) as u64;
    let mut sched = FrameSchedule::new(Protocol::Ais);
    for i in 0..frame_count(rate, s.duration) {
        let t = i as f64 / rate;
        let who = (i % total) as usize;
        let bits = if who < n_alerts {
            texts[who].clone()
        } else {
            intruder_report(&geoms[who - n_alerts], ids[who], t)?.0
        };
        sched.push(us(t), 0, bits);
    }
    Ok(AttackOutput::from_schedule(sched))
}

/// Synthetic traffic picture (`n_targets`, default 8) plus the inventory a
/// passive listener builds from it.
pub fn gen_traffic_reconnaissance(s: &AttackScenario) -> Result<AttackOutput, AttackError> {
    let n = s.param_u64("n_targets", 8)? as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let targets = random_targets(s, &mut rng, n)?;
    let mut sched = FrameSchedule::new(s.protocol);
    let mut truths = Vec::new();
    let none: OffsetFn = &|_| (0.0, 0.0);
    let rate = s.rate();
    for (i, tg) in targets.iter().enumerate() {
        let mut part = FrameSchedule::new(s.protocol);
        let mut part_truth = Vec::new();
        match s.protocol {
            Protocol::Adsb => {
                let k = Kinematics { callsign: format!("TGT{i:03}"), ..tg.kin.clone() };
                adsb_track(&mut part, &mut part_truth, tg.id, &k, rate, s.duration, 5.0, none)?
            }
            Protocol::Ais => ais_track(&mut part, &mut part_truth, tg.id, &tg.kin, rate, s.duration, 0, none)?,
            p => return Err(AttackError::Invalid(format!("reconnaissance traffic is not modelled for {p}"))),
        }
        // stagger targets so their frames do not overlap on air
        let shift = (i as u64 + 1) * 1_700;
        for e in part.entries {
            sched.push(e.timestamp_us + shift, 0, e.frame.bits);
        }
        for mut t in part_truth {
            t.timestamp_us += shift;
            truths.push(t);
        }
    }
    sched.sort();
    let inventory = recon::inventory_schedule(&sched);
    Ok(AttackOutput { schedule: Some(sched), truth: truths, inventory: Some(inventory), ..Default::default() })
}

/// Seed corpus for fuzzing: one valid frame of each common message kind.
pub fn fuzz_corpus(s: &AttackScenario) -> Result<Vec<Bits>, AttackError> {
    let k = s.kinematics();
    let st = k.state();
    Ok(match s.protocol {
        Protocol::Adsb => vec![
            adsb::encode_identification(k.icao24, &k.callsign)?.to_bits(),
            adsb::encode_airborne_position(k.icao24, &st, CprFormat::Even)?.to_bits(),
            adsb::encode_velocity(k.icao24, &st)?.to_bits(),
        ],
        Protocol::Ais => vec![
            ais_report(k.mmsi, &st, 0)?,
            ais::encode_safety_broadcast(k.mmsi, "MAN OVERBOARD")?.to_bits(),
        ],
        Protocol::Epirb => {
            let pos = Some((st.latitude, st.longitude));
            vec![
                epirb::encode_beacon(&beacon_for(s, &k, pos)?)?,
                epirb::encode_beacon(&BeaconMessage::elt((k.mmsi / 1_000_000) as u16, k.icao24, pos))?,
                epirb::encode_beacon(&BeaconMessage::plb((k.mmsi / 1_000_000) as u16, 12_345, 100, pos))?,
            ]
        }
        Protocol::Gdl90 => vec![
            Bits::from_bytes(&heartbeat(0).to_bytes()),
            Bits::from_bytes(&gdl90::encode_traffic_report(k.icao24, &st)?.to_bytes()),
            Bits::from_bytes(&gdl90::encode_ownship_report(k.icao24 ^ 1, &st)?.to_bytes()),
        ],
        Protocol::Ccsds => vec![Bits::from_bytes(&ccsds::encode_packet(&ccsds_template(s)?)?)],
    })
}

/// Fuzz campaign over [`fuzz_corpus`], `iterations` inputs at `rate`.
pub fn gen_fuzzing(s: &AttackScenario) -> Result<AttackOutput, AttackError> {
    let rate = s.rate();
    let iterations = s.param_u64("iterations", frame_count(rate, s.duration).max(1))?;
    let corpus = fuzz_corpus(s)?;
    let records = fuzz::fuzz(&corpus, s.protocol, iterations, s.seed)?;
    let mut sched = FrameSchedule::new(s.protocol);
    for r in &records {
        sched.push(us(r.iteration as f64 / rate), 0, r.input.clone());
    }
    Ok(AttackOutput { schedule: Some(sched), fuzz_log: records, ..Default::default() })
}

/// A captured frame (`capture_hex`, default the first spoofed frame)
/// repeated `count` times. CCSDS uses the sequence builder's replay.
pub fn gen_replay(s: &AttackScenario) -> Result<AttackOutput, AttackError> {
    let rate = s.rate();
    let count = s.param_u64("count", frame_count(rate, s.duration).max(1))?;
    if s.protocol == Protocol::Ccsds {
        let n = u32::try_from(count).map_err(|_| param_err("count", "too large"))?;
        let seq = build_dos_sequence(&ccsds_template(s)?, &[Mutation::Replay(n)], s.seed);
        return Ok(AttackOutput::from_schedule(seq.to_schedule()));
    }
    let captured = match s.param_str("capture_hex", "")? {
        "" => {
            let one = AttackScenario { duration: 1.0 / rate, ..s.clone() };
            let sp = gen_spoof(&one)?;
            sp.schedule().entries.first().map(|e| e.frame.bits.clone()).ok_or_else(|| {
                AttackError::Invalid("nothing to capture".into())
            })?
        }
        h => Bits::from_hex(h.trim(), None).map_err(|e| param_err("capture_hex", e.to_string()))?,
    };
    let mut sched = FrameSchedule::new(s.protocol);
    for i in 0..count {
        sched.push(us(i as f64 / rate), 0, captured.clone());
    }
    Ok(AttackOutput::from_schedule(sched))
}
