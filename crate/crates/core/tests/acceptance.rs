//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always print.
//!
//! Checksums are compared against oracles written here from the polynomial
//! definitions, not against the library's own helpers.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saamd::adsb::{self, cpr, AdsbMessage, CprFormat, EmergencyState, KinematicState};
use saamd::ais::{self, air, nmea, AirFrameOptions, AisMessage, Channel, TrainingPattern, VesselReport};
use saamd::attack::{self, catalog, gen_flood, gen_preamble_test, gen_spoof, AttackKind, AttackScenario};
use saamd::ccsds::{self, PacketType, SpacePacket};
use saamd::decode::{decode_any, TargetId};
use saamd::epirb::{self, bch::BchCode, BeaconMessage, LocationScheme};
use saamd::gdl90;
use saamd::harness::loopback::{preamble_sensitivity, verify_loopback};
use saamd::harness::{self, HarnessInput, ReceiverModel};
use saamd::modem::{self, ppm, ModemConfig};
use saamd::{Bits, FrameSchedule, Protocol};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_bits(r: &mut impl Rng, n: usize) -> Bits {
    Bits::from_bools((0..n).map(|_| r.gen()).collect())
}

fn callsign(r: &mut impl Rng, max: usize) -> String {
    const A: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    let n = r.gen_range(1..=max);
    (0..n).map(|_| A[r.gen_range(0..A.len())] as char).collect()
}

// ---------------------------------------------------------------------------
// 1. Codec round trips

const ROUND_TRIPS: usize = 10_000;

fn rt_adsb(r: &mut ChaCha8Rng) -> Result<(), String> {
    for i in 0..ROUND_TRIPS {
        let icao = r.gen_range(0..1u32 << 24);
        let st = KinematicState {
            latitude: r.gen_range(-89.0..89.0),
            longitude: r.gen_range(-180.0..180.0),
            altitude_ft: r.gen_range(-1000.0..50_000.0),
            ground_speed_kt: r.gen_range(50.0..600.0),
            track_deg: r.gen_range(0.0..360.0),
            callsign: callsign(r, 8),
            squawk_emergency: false,
        };
        let frame = match i % 4 {
            0 => adsb::encode_identification(icao, &st.callsign),
            1 => adsb::encode_airborne_position(icao, &st, if r.gen() { CprFormat::Even } else { CprFormat::Odd }),
            2 => adsb::encode_velocity(icao, &st),
            _ => adsb::encode_emergency(icao, EmergencyState::General),
        }
        .map_err(|e| format!("adsb encode {st:?}: {e}"))?;
        let bits = frame.to_bits();
        let d = adsb::decode_frame(&bits, true);
        let msg = d.message.clone().ok_or_else(|| format!("adsb strict decode failed: {}", d.diagnosis))?;
        check(d.icao24 == icao && d.diagnosis.is_empty(), || format!("adsb header {d:?}"))?;
        match &msg {
            AdsbMessage::Identification(m) => check(m.callsign == st.callsign, || format!("callsign {m:?}"))?,
            AdsbMessage::AirbornePosition(p) => {
                let alt = p.altitude_ft.ok_or("altitude lost")? as f64;
                check((alt - st.altitude_ft).abs() <= 12.5, || format!("altitude {alt} vs {}", st.altitude_ft))?;
                let want = cpr::encode(st.latitude, st.longitude, p.cpr.format).map_err(|e| e.to_string())?;
                check(p.cpr == want, || format!("cpr {:?} vs {want:?}", p.cpr))?;
            }
            AdsbMessage::Velocity(v) => {
                let e = st.ground_speed_kt * st.track_deg.to_radians().sin();
                let n = st.ground_speed_kt * st.track_deg.to_radians().cos();
                let (ge, gn) = (v.east_kt.ok_or("east lost")? as f64, v.north_kt.ok_or("north lost")? as f64);
                check((ge - e).abs() <= 0.5 + 1e-9 && (gn - n).abs() <= 0.5 + 1e-9, || {
                    format!("velocity ({ge},{gn}) vs ({e},{n})")
                })?;
            }
            AdsbMessage::EmergencyStatus(s) => check(s.emergency == EmergencyState::General, || format!("{s:?}"))?,
            other => return Err(format!("unexpected {other:?}")),
        }
        let again = adsb::encode_message(icao, &msg).map_err(|e| e.to_string())?.to_bits();
        check(again == bits, || format!("adsb re-encode differs for {}", bits.to_hex()))?;
    }
    Ok(())
}

fn ais_text(r: &mut ChaCha8Rng) -> String {
    let words = r.gen_range(1..6);
    (0..words).map(|_| callsign(r, 8)).collect::<Vec<_>>().join(" ")
}

fn rt_ais(r: &mut ChaCha8Rng) -> Result<(), String> {
    let sweep = TrainingPattern::default_sweep();
    for i in 0..ROUND_TRIPS {
        let mmsi = r.gen_range(1..1u32 << 30);
        let pos = r.gen_bool(0.95).then(|| (r.gen_range(-90.0..=90.0), r.gen_range(-180.0..=180.0)));
        let report = VesselReport {
            mmsi,
            lat: pos.map(|p| p.0),
            lon: pos.map(|p| p.1),
            sog_kt: r.gen_bool(0.95).then(|| r.gen_range(0.0..=102.2)),
            cog_deg: r.gen_bool(0.95).then(|| r.gen_range(0.0..360.0)),
            heading: r.gen_bool(0.95).then(|| r.gen_range(0..360)),
            nav_status: r.gen_range(0..16),
        };
        let text = ais_text(r);
        let m = match i % 3 {
            0 => ais::encode_position_report(&report),
            1 => ais::encode_class_b(&report),
            _ => ais::encode_safety_broadcast(mmsi, &text),
        }
        .map_err(|e| format!("ais encode: {e}"))?;
        let bits = m.to_bits();
        let d = ais::decode_message(&bits);
        check(d.message.as_ref() == Some(&m) && d.diagnosis.is_empty(), || format!("ais message {d:?}"))?;
        let got = d.message.unwrap();
        check(got.mmsi() == mmsi, || "mmsi".into())?;
        match &got {
            AisMessage::Safety(s) => check(s.text == text, || format!("text {:?} vs {text:?}", s.text))?,
            _ => {
                let q = 1.0 / 600_000.0 / 2.0 + 1e-12;
                match (report.lat.zip(report.lon), got.position()) {
                    (Some((la, lo)), Some((a, b))) => {
                        check((a - la).abs() <= q && (b - lo).abs() <= q, || format!("position ({a},{b}) vs ({la},{lo})"))?
                    }
                    (None, None) => {}
                    (want, have) => return Err(format!("position availability {want:?} vs {have:?}")),
                }
                if let (Some(s), Some(c), Some((gs, gc))) = (report.sog_kt, report.cog_deg, got.motion()) {
                    let dc = (gc - c).abs().min(360.0 - (gc - c).abs());
                    check((gs - s).abs() <= 0.05 + 1e-9 && dc <= 0.05 + 1e-9, || format!("motion ({gs},{gc}) vs ({s},{c})"))?;
                }
            }
        }
        // Air layer with a varying training sequence, then AIVDM armoring.
        let opts = AirFrameOptions { training: sweep[i % sweep.len()], ..AirFrameOptions::default() };
        let a = ais::decode_air(&air::build_air_frame(&bits, &opts).to_bits(), false);
        check(a.message.as_ref() == Some(&m), || format!("air layer {:?}", a.diagnosis))?;
        check(a.training.len() == opts.training.length, || "training length".into())?;
        let sentences: Vec<String> = nmea::build_aivdm_sentences(&m, Channel::B, (i % 10) as u8).iter().map(|s| s.to_string()).collect();
        let back = nmea::decode_aivdm(sentences.iter().map(String::as_str)).map_err(|e| e.to_string())?;
        check(back.len() == 1 && back[0].message.as_ref() == Some(&m), || format!("aivdm {sentences:?}"))?;
    }
    Ok(())
}

fn rt_epirb(r: &mut ChaCha8Rng) -> Result<(), String> {
    for i in 0..ROUND_TRIPS {
        let position = r.gen_bool(0.9).then(|| (r.gen_range(-90.0..=90.0), r.gen_range(-180.0..=180.0)));
        let country = r.gen_range(200..800u16);
        let scheme = if r.gen() { LocationScheme::User } else { LocationScheme::Standard };
        let mut m = match i % 3 {
            0 => BeaconMessage::maritime(country as u32 * 1_000_000 + r.gen_range(0..1_000_000), r.gen_range(0..10), position),
            1 => BeaconMessage::elt(country, r.gen_range(0..1u32 << 24), position),
            _ => {
                let max = if scheme == LocationScheme::User { 1 << 20 } else { 1 << 14 };
                BeaconMessage::plb(country, r.gen_range(0..max), r.gen_range(0..1024), position)
            }
        };
        m.scheme = scheme;
        m.self_test = r.gen_bool(0.1);
        let bits = epirb::encode_beacon(&m).map_err(|e| format!("epirb encode {m:?}: {e}"))?;
        let d = epirb::decode_beacon(&bits, false);
        let got = d.message.ok_or_else(|| format!("epirb strict decode failed: {}", d.diagnosis))?;
        check(
            got.identity == m.identity && got.country_code == m.country_code && got.scheme == m.scheme && got.self_test == m.self_test,
            || format!("epirb fields {got:?} vs {m:?}"),
        )?;
        let half = m.position_resolution() / 2.0 + 1e-9;
        match (m.position, got.position) {
            (Some((la, lo)), Some((a, b))) => check((a - la).abs() <= half && (b - lo).abs() <= half, || {
                format!("beacon position ({a},{b}) vs ({la},{lo}) at {half}")
            })?,
            (None, None) => {}
            (w, h) => return Err(format!("beacon position availability {w:?} vs {h:?}")),
        }
        let again = epirb::encode_beacon(&got).map_err(|e| e.to_string())?;
        check(again == bits, || "epirb re-encode differs".into())?;
    }
    Ok(())
}

fn rt_gdl90(r: &mut ChaCha8Rng) -> Result<(), String> {
    for i in 0..ROUND_TRIPS {
        let addr = r.gen_range(0..1u32 << 24);
        let st = KinematicState {
            latitude: r.gen_range(-90.0..90.0),
            longitude: r.gen_range(-180.0..180.0),
            altitude_ft: r.gen_range(-1000.0..100_000.0),
            ground_speed_kt: r.gen_range(0.0..4000.0),
            track_deg: r.gen_range(0.0..360.0),
            callsign: callsign(r, 8),
            squawk_emergency: false,
        };
        let msg = if i % 5 == 0 {
            gdl90::Heartbeat {
                status1: r.gen(),
                status2: r.gen::<u8>() & 0x7F,
                timestamp: r.gen_range(0..86_400),
                uplink_count: r.gen_range(0..32),
                basic_long_count: r.gen_range(0..1024),
            }
            .to_message()
        } else if i % 2 == 0 {
            gdl90::encode_traffic_report(addr, &st).map_err(|e| e.to_string())?
        } else {
            gdl90::encode_ownship_report(addr, &st).map_err(|e| e.to_string())?
        };
        let framed = gdl90::frame(&msg);
        let d = gdl90::deframe(&framed, false);
        check(d.message.as_ref() == Some(&msg) && d.diagnosis.is_empty(), || format!("gdl90 deframe {:?}", d.diagnosis))?;
        if let Some(hb) = gdl90::Heartbeat::from_message(&msg) {
            check(hb.to_message() == msg, || "heartbeat".into())?;
            continue;
        }
        let rep = gdl90::decode_report(&msg).ok_or("report did not decode")?;
        let lsb = 180.0 / (1u32 << 23) as f64;
        check(
            // semicircles are floored, so the decoded value sits up to one LSB below
            (0.0..lsb + 1e-12).contains(&(st.latitude - rep.latitude))
                && (0.0..lsb + 1e-12).contains(&(st.longitude - rep.longitude)),
            || format!("report position ({}, {}) vs ({}, {})", rep.latitude, rep.longitude, st.latitude, st.longitude),
        )?;
        let alt = rep.altitude_ft.ok_or("altitude lost")?;
        check((alt - st.altitude_ft).abs() <= 12.5 + 1e-9, || format!("altitude {alt} vs {}", st.altitude_ft))?;
        check(rep.callsign.trim_end() == st.callsign && rep.address == addr, || format!("identity {rep:?}"))?;
        check(gdl90::encode_report(msg.id, &rep).map_err(|e| e.to_string())? == msg, || "report re-encode differs".into())?;
    }
    Ok(())
}

fn rt_ccsds(r: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..ROUND_TRIPS {
        let n = r.gen_range(1..=256);
        let p = SpacePacket {
            version: 0,
            packet_type: if r.gen() { PacketType::Telecommand } else { PacketType::Telemetry },
            sec_hdr_flag: r.gen(),
            apid: r.gen_range(0..=ccsds::MAX_APID),
            seq_flags: r.gen_range(0..4),
            seq_count: r.gen_range(0..=ccsds::MAX_SEQ_COUNT),
            payload: (0..n).map(|_| r.gen()).collect(),
        };
        let bytes = ccsds::encode_packet(&p).map_err(|e| e.to_string())?;
        check(bytes.len() == ccsds::HEADER_BYTES + n, || "packet length".into())?;
        let d = ccsds::decode_packet(&bytes, false);
        check(d.packet.as_ref() == Some(&p) && d.diagnosis.is_empty(), || format!("ccsds {:?}", d.diagnosis))?;
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    rt_adsb(&mut r)?;
    rt_ais(&mut r)?;
    rt_epirb(&mut r)?;
    rt_gdl90(&mut r)?;
    rt_ccsds(&mut r)?;
    let t = start.elapsed();
    check(t < Duration::from_secs(60), || format!("took {t:.1?}"))?;
    Ok(format!("5 codecs x {ROUND_TRIPS} cases (AIS message, air and AIVDM layers) in {t:.1?}"))
}

// ---------------------------------------------------------------------------
// 2. Checksum oracles

/// Remainder of `v(x) mod g(x)` for a polynomial held as a bool vector,
/// highest power first, shifting one bit at a time.
fn poly_rem(mut v: Vec<bool>, generator: u64, deg: usize) -> u64 {
    let g: Vec<bool> = (0..=deg).rev().map(|i| generator >> i & 1 == 1).collect();
    for i in 0..v.len().saturating_sub(deg) {
        if v[i] {
            for (j, gb) in g.iter().enumerate() {
                v[i + j] ^= gb;
            }
        }
    }
    v[v.len().saturating_sub(deg)..].iter().fold(0, |acc, &b| acc << 1 | b as u64)
}

/// Remainder of `bits(x) * x^deg mod g(x)`.
fn poly_mod(bits: &[bool], generator: u64, deg: usize) -> u64 {
    let mut v = bits.to_vec();
    v.extend(std::iter::repeat_n(false, deg));
    poly_rem(v, generator, deg)
}

fn bytes_msb(data: &[u8]) -> Vec<bool> {
    data.iter().flat_map(|b| (0..8).rev().map(move |i| b >> i & 1 == 1)).collect()
}

fn bytes_lsb(data: &[u8]) -> Vec<bool> {
    data.iter().flat_map(|b| (0..8).map(move |i| b >> i & 1 == 1)).collect()
}

/// CRC-16/X.25 as a non-reflected division of `M(x) x^16 + P(x) x^n` with
/// the all-ones preset P, then bit-reversed and complemented.
fn x25_oracle(data: &[u8]) -> u16 {
    let mut v = bytes_lsb(data);
    v.extend([false; 16]);
    for b in v.iter_mut().take(16) {
        *b = !*b;
    }
    let rem = poly_rem(v, 0x1_1021, 16) as u16;
    !rem.reverse_bits()
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    const N: usize = 200;
    // ADS-B CRC-24 over the 88 data bits.
    let klm = hex::decode("8D4840D6202CC371C32CE0576098").unwrap();
    let klm_parity = poly_mod(&bytes_msb(&klm[..11]), 0x1FF_F409, 24);
    check(klm_parity == 0x57_6098, || format!("KLM oracle parity {klm_parity:06X}"))?;
    check(adsb::crc::crc24_bytes(&klm[..11]) == 0x57_6098, || "KLM library parity".into())?;
    for _ in 0..N {
        let d: Vec<u8> = (0..11).map(|_| r.gen()).collect();
        check(adsb::crc::crc24_bytes(&d) as u64 == poly_mod(&bytes_msb(&d), 0x1FF_F409, 24), || format!("crc24 {d:02X?}"))?;
        let bits = Bits::from_bytes(&d);
        check(adsb::crc::crc24(&bits).map_err(|e| e.to_string())? as u64 == poly_mod(&bits, 0x1FF_F409, 24), || "crc24 bits".into())?;
    }
    // AIS HDLC CRC-16: the library works on air-order bits.
    check(x25_oracle(b"123456789") == 0x906E, || "x25 oracle check value".into())?;
    for _ in 0..N {
        let n = r.gen_range(1..40);
        let d: Vec<u8> = (0..n).map(|_| r.gen()).collect();
        check(air::crc16_bits(&bytes_lsb(&d)) == x25_oracle(&d), || format!("crc16 {d:02X?}"))?;
    }
    // GDL-90 CRC-16-CCITT: zero preset, no reflection, remainder of M(x) itself
    // (the table form feeds each byte in at the low end, so no x^16 shift).
    // Heartbeat example from the GDL-90 interface document.
    let hb = gdl90::frame_bytes(&[0x00, 0x81, 0x41, 0xDB, 0xD0, 0x08, 0x02]);
    check(hb == [0x7E, 0x00, 0x81, 0x41, 0xDB, 0xD0, 0x08, 0x02, 0xB3, 0x8B, 0x7E], || format!("heartbeat {hb:02X?}"))?;
    for _ in 0..N {
        let n = r.gen_range(1..40);
        let d: Vec<u8> = (0..n).map(|_| r.gen()).collect();
        check(gdl90::crc16(&d) as u64 == poly_rem(bytes_msb(&d), 0x1_1021, 16), || format!("gdl90 crc {d:02X?}"))?;
    }
    // Beacon BCH codes over random data words.
    for (code, g, deg) in [(BchCode::Bch1, 0x26_D9E3u64, 21), (BchCode::Bch2, 0x1539, 12)] {
        for _ in 0..N {
            let data = random_bits(&mut r, code.data_bits());
            let lib = epirb::bch::bch_encode(&data, code).map_err(|e| e.to_string())?;
            let want = poly_mod(&data, g, deg);
            check(lib.uint(0, deg) == want, || format!("{code:?} {}", data.to_hex()))?;
            // The whole codeword is a multiple of the generator.
            let mut cw = data.clone();
            cw.push_bits(&lib);
            check(poly_mod(&cw, g, deg) == 0, || format!("{code:?} codeword not divisible"))?;
        }
    }
    Ok(format!("CRC-24, AIS CRC-16, GDL-90 CRC, BCH-1, BCH-2 x {N} inputs; KLM parity 0x576098"))
}

// ---------------------------------------------------------------------------
// 3. CPR

/// Latitude where NL drops from `n` to `n - 1`, from the closed form.
fn nl_transition(n: u32) -> f64 {
    let nz = 15.0;
    let a = 1.0 - (std::f64::consts::PI / (2.0 * nz)).cos();
    let b = 1.0 - (2.0 * std::f64::consts::PI / n as f64).cos();
    (a / b).sqrt().acos().to_degrees()
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let boundaries: Vec<f64> = (2..=59).map(nl_transition).collect();
    // Beyond 75.4 deg the odd zone is wider than 26 deg and one longitude
    // LSB exceeds 0.0002 deg, so the bound cannot hold there by construction.
    let (mut n, mut worst) = (0, 0.0f64);
    while n < 1000 {
        let lat: f64 = r.gen_range(-75.0..75.0);
        let lon: f64 = r.gen_range(-180.0..180.0);
        if boundaries.iter().any(|b| (lat.abs() - b).abs() < 0.01) {
            continue;
        }
        n += 1;
        let e = cpr::encode(lat, lon, CprFormat::Even).map_err(|e| e.to_string())?;
        let o = cpr::encode(lat, lon, CprFormat::Odd).map_err(|e| e.to_string())?;
        for recent in [CprFormat::Even, CprFormat::Odd] {
            let (a, b) = cpr::decode_global(e, o, recent).map_err(|e| format!("({lat},{lon}): {e}"))?;
            let dlon = {
                let d = (b - lon).abs();
                d.min(360.0 - d)
            };
            worst = worst.max((a - lat).abs()).max(dlon);
            check((a - lat).abs() <= 1e-4 && dlon <= 1e-4, || format!("({lat},{lon}) -> ({a},{b})"))?;
        }
    }
    // Boundary pairs one aircraft could plausibly produce: under 2 km apart.
    // Larger separations break the zone-index step at any latitude.
    let mut ambiguous = 0;
    for (i, &t) in boundaries.iter().enumerate() {
        for sign in [1.0, -1.0] {
            for even_below in [true, false] {
                let delta = r.gen_range(0.0005..0.01);
                let lon = r.gen_range(-180.0..180.0);
                let (below, above) = (sign * (t - delta), sign * (t + delta));
                let (le, lo) = if even_below { (below, above) } else { (above, below) };
                let e = cpr::encode(le, lon, CprFormat::Even).map_err(|e| e.to_string())?;
                let o = cpr::encode(lo, lon, CprFormat::Odd).map_err(|e| e.to_string())?;
                for recent in [CprFormat::Even, CprFormat::Odd] {
                    match cpr::decode_global(e, o, recent) {
                        Err(cpr::CprError::Ambiguous { .. }) => ambiguous += 1,
                        other => return Err(format!("boundary NL={} at {le}/{lo}: {other:?}", i + 2)),
                    }
                }
            }
        }
    }
    Ok(format!("1000 positions |lat|<75, worst error {worst:.2e} deg; {ambiguous}/{ambiguous} boundary pairs ambiguous"))
}

// ---------------------------------------------------------------------------
// 4. Modem loopback

fn random_schedule(p: Protocol, n: usize, r: &mut ChaCha8Rng) -> FrameSchedule {
    let mut s = FrameSchedule::new(p);
    let gap = match p {
        Protocol::Adsb => 200,
        Protocol::Ais => 40_000,
        _ => 600_000,
    };
    for i in 0..n {
        let bits = match p {
            Protocol::Adsb => {
                let st = KinematicState {
                    latitude: r.gen_range(-60.0..60.0),
                    longitude: r.gen_range(-180.0..180.0),
                    altitude_ft: r.gen_range(0.0..40_000.0),
                    ..Default::default()
                };
                adsb::encode_airborne_position(r.gen_range(0..1 << 24), &st, CprFormat::Even).unwrap().to_bits()
            }
            Protocol::Ais => ais::encode_position_report(&VesselReport {
                mmsi: r.gen_range(1..1 << 30),
                lat: Some(r.gen_range(-90.0..90.0)),
                lon: Some(r.gen_range(-180.0..180.0)),
                sog_kt: Some(r.gen_range(0.0..100.0)),
                cog_deg: Some(r.gen_range(0.0..359.0)),
                heading: Some(r.gen_range(0..360)),
                nav_status: 0,
            })
            .unwrap()
            .to_bits(),
            _ => {
                let pos = Some((r.gen_range(-90.0..90.0), r.gen_range(-180.0..180.0)));
                epirb::encode_beacon(&BeaconMessage::maritime(244_000_000 + r.gen_range(0..1_000_000), 1, pos)).unwrap()
            }
        };
        s.push(i as u64 * gap, 0, bits);
    }
    s
}

/// Sweeps the PPM detection thresholds over one 20 dB capture and returns
/// (preamble_ratio, min_clarity, frames recovered) per setting. The shipped
/// defaults must sit inside the plateau where recovery is complete.
fn calibration(s: &FrameSchedule, cfg: &ModemConfig) -> Result<Vec<(f32, f32, usize)>, String> {
    let mut iq = modem::modulate_schedule(s, cfg).map_err(|e| e.to_string())?;
    modem::add_awgn(&mut iq, 20.0, cfg.peak, 45);
    let truth: std::collections::BTreeSet<String> = s.entries.iter().map(|e| e.frame.bits.to_hex()).collect();
    let mut rows = Vec::new();
    for ratio in [1.5f32, 2.0, 3.0] {
        for clarity in [0.3f32, 0.5, 0.7] {
            let c = ppm::PpmDemodConfig { preamble_ratio: ratio, min_clarity: clarity, ..Default::default() };
            let hits = ppm::ppm_demodulate(&iq, &c).iter().filter(|f| truth.contains(&f.bits.to_hex())).count();
            rows.push((ratio, clarity, hits));
        }
    }
    Ok(rows)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut r = rng(4);
    let cfg = ModemConfig::default();
    let mut summary = Vec::new();
    for (p, n) in [(Protocol::Adsb, 200), (Protocol::Ais, 100), (Protocol::Epirb, 20)] {
        let s = random_schedule(p, n, &mut r);
        let iq = modem::modulate_schedule(&s, &cfg).map_err(|e| e.to_string())?;
        let rx = modem::demodulate_stream(p, &iq, &cfg);
        check(rx.len() == s.len(), || format!("{p}: {} of {} bursts", rx.len(), s.len()))?;
        let mut errors = 0usize;
        let mut total = 0usize;
        for (e, (_, got)) in s.entries.iter().zip(&rx) {
            total += e.frame.bits.len();
            errors += e.frame.bits.iter().zip(got.iter()).filter(|(a, b)| a != b).count();
            errors += e.frame.bits.len().saturating_sub(got.len());
        }
        check(errors == 0, || format!("{p}: {errors} bit errors"))?;
        summary.push(format!("{p} BER 0/{total}"));
    }
    let s = random_schedule(Protocol::Adsb, 1000, &mut r);
    let rep = verify_loopback(&s, &cfg, Some(20.0), 44).map_err(|e| e.to_string())?;
    check(rep.recovery() >= 0.99, || format!("20 dB recovery {:.3}", rep.recovery()))?;
    let d = ppm::PpmDemodConfig::default();
    let sweep = calibration(&s, &cfg)?;
    let at_default = sweep.iter().find(|(r, c, _)| *r == d.preamble_ratio && *c == d.min_clarity).map(|x| x.2);
    check(at_default.is_some_and(|n| n >= 990), || format!("calibration at defaults: {at_default:?}"))?;
    let sweep: Vec<String> = sweep.iter().map(|(r, c, n)| format!("{r}/{c}:{n}")).collect();
    let t = start.elapsed();
    check(t < Duration::from_secs(120), || format!("took {t:.1?}"))?;
    Ok(format!(
        "{}; PPM at 20 dB {}/1000; ratio/clarity sweep [{}] in {t:.1?}",
        summary.join(", "),
        rep.recovered,
        sweep.join(" ")
    ))
}

// ---------------------------------------------------------------------------
// 5. Determinism

fn criterion_5() -> Outcome {
    let entries = catalog();
    let (mut adsb_n, mut ais_n, mut sat_n) = (0, 0, 0);
    for c in &entries {
        let s = &c.scenario;
        let a = attack::generate(s).map_err(|e| format!("{}: {e}", c.title))?;
        let reloaded = AttackScenario::from_toml(&s.to_toml()).map_err(|e| format!("{}: {e}", c.title))?;
        check(reloaded.config_hash() == s.config_hash(), || format!("{}: config hash", c.title))?;
        let b = attack::generate(&reloaded).map_err(|e| format!("{}: {e}", c.title))?;
        check(a == b, || format!("{}: outputs differ", c.title))?;
        let replay = |o: &attack::AttackOutput| o.schedule.as_ref().map(FrameSchedule::to_replay);
        check(replay(&a) == replay(&b), || format!("{}: replay text differs", c.title))?;
        if let (Some(x), Some(y)) = (&a.iq, &b.iq) {
            let fmt = modem::IqFormat::Cf32;
            check(modem::iq::encode(x, fmt) == modem::iq::encode(y, fmt), || format!("{}: IQ bytes differ", c.title))?;
        }
        match c.family {
            "adsb" => adsb_n += 1,
            "ais" => ais_n += 1,
            _ => sat_n += 1,
        }
    }
    check(adsb_n == 12 && ais_n == 11, || format!("catalog has {adsb_n} ADS-B and {ais_n} AIS kinds"))?;
    Ok(format!("{} scenarios ({adsb_n} ADS-B, {ais_n} AIS, {sat_n} EPIRB/CCSDS) byte-identical", entries.len()))
}

// ---------------------------------------------------------------------------
// 6. Harness DoS law

fn flood(rate: f64, n: usize, duration: f64, seed: u64) -> Result<FrameSchedule, String> {
    let s = AttackScenario::new(Protocol::Adsb, AttackKind::Flooding, duration).with_rate(rate).with_seed(seed);
    Ok(gen_flood(&s, n).map_err(|e| e.to_string())?.schedule.unwrap())
}

fn criterion_6() -> Outcome {
    let model = ReceiverModel::new(Protocol::Adsb);
    let budget = model.per_second_budget as f64;
    let sched = flood(2.0 * budget, 50, 10.0, 6)?;
    let rep = harness::run(&model, HarnessInput::Schedule(&sched), None).map_err(|e| e.to_string())?;
    let ratio = rep.drop_ratio();
    check((ratio - 0.5).abs() <= 0.01, || format!("drop ratio {ratio}"))?;

    let sched = flood(100.0, 1000, 10.0, 6)?;
    let lru = ReceiverModel { track_capacity: 100, ..ReceiverModel::new(Protocol::Adsb) };
    let rep = harness::run(&lru, HarnessInput::Schedule(&sched), None).map_err(|e| e.to_string())?;
    check(rep.tracks_created == 1000 && rep.tracks_evicted == 900, || {
        format!("created {} evicted {}", rep.tracks_created, rep.tracks_evicted)
    })?;

    let sched = flood(600.0, 20, 5.0, 7)?;
    let mut fractions = Vec::new();
    for (k, n) in [(0, 5), (3, 7), (5, 9), (4, 4)] {
        let models: Vec<ReceiverModel> = (0..n)
            .map(|i| ReceiverModel { per_second_budget: if i < k { 300 } else { 1000 }, ..ReceiverModel::new(Protocol::Adsb) })
            .collect();
        let f = harness::fleet_run(&models, &sched, None).map_err(|e| e.to_string())?;
        check(f.affected == k && f.total == n && f.affected_fraction == k as f64 / n as f64, || {
            format!("fleet {k}/{n}: {}/{}", f.affected, f.total)
        })?;
        fractions.push(format!("{k}/{n}"));
    }
    Ok(format!("drop ratio {ratio:.4} at 2x budget; LRU evicted 900/1000; fleet fractions {} exact", fractions.join(" ")))
}

// ---------------------------------------------------------------------------
// 7. End-to-end spoof fidelity

fn criterion_7() -> Outcome {
    let cfg = ModemConfig::default();
    let mut lines = Vec::new();
    for (p, duration, bound) in [(Protocol::Adsb, 10.0, 1e-4), (Protocol::Ais, 60.0, 1.0 / 600_000.0), (Protocol::Epirb, 300.0, 1.0 / 30.0)] {
        let sc = AttackScenario::new(p, AttackKind::Spoofing, duration).with_seed(7);
        let out = gen_spoof(&sc).map_err(|e| e.to_string())?;
        let iq = out.modulate(&cfg).map_err(|e| e.to_string())?.ok_or("no waveform")?;
        let inv = attack::recon::inventory_iq(p, &iq, &cfg);
        check(inv.undecoded == 0, || format!("{p}: {} undecoded", inv.undecoded))?;
        check(!out.truth.is_empty(), || format!("{p}: no truth"))?;
        let tol_us = 1e6 / match p {
            Protocol::Adsb => 1e6,
            Protocol::Ais => 9600.0,
            _ => 400.0,
        };
        let mut matched = 0;
        let mut worst = 0.0f64;
        for t in &out.truth {
            let row = inv.row(&t.id).ok_or_else(|| format!("{p}: {} missing from inventory", t.id))?;
            let Some(&(_, lat, lon)) = row.track.iter().find(|(ts, ..)| (*ts as f64 - t.timestamp_us as f64).abs() <= tol_us) else {
                // The first ADS-B position has no partner for a global decode.
                if p == Protocol::Adsb && matched == 0 {
                    continue;
                }
                return Err(format!("{p}: no track point at {} us", t.timestamp_us));
            };
            let err = (lat - t.latitude).abs().max((lon - t.longitude).abs());
            worst = worst.max(err);
            check(err <= bound + 1e-9, || format!("{p}: error {err} at {} us", t.timestamp_us))?;
            matched += 1;
        }
        if p == Protocol::Adsb {
            let TargetId::Icao(_) = &out.truth[0].id else { return Err("adsb truth id".into()) };
            let row = inv.row(&out.truth[0].id).unwrap();
            check(row.label.as_deref() == Some(sc.kinematics().callsign.as_str()), || format!("callsign {:?}", row.label))?;
        }
        lines.push(format!("{p} {matched}/{} points, worst {worst:.1e} deg", out.truth.len()));
    }
    Ok(lines.join("; "))
}

// ---------------------------------------------------------------------------
// 8. Fuzzer robustness

fn corpus(p: Protocol) -> Vec<Bits> {
    let mut r = rng(8);
    match p {
        Protocol::Adsb => {
            let st = KinematicState { latitude: 52.0, longitude: 4.0, altitude_ft: 30_000.0, ground_speed_kt: 400.0, track_deg: 10.0, ..Default::default() };
            vec![
                adsb::encode_identification(0x4840D6, "KLM1023").unwrap().to_bits(),
                adsb::encode_airborne_position(0x4840D6, &st, CprFormat::Odd).unwrap().to_bits(),
                adsb::encode_velocity(0x4840D6, &st).unwrap().to_bits(),
                adsb::encode_emergency(0x4840D6, EmergencyState::Medical).unwrap().to_bits(),
            ]
        }
        Protocol::Ais => {
            let v = VesselReport { mmsi: 244_123_456, lat: Some(52.0), lon: Some(4.0), sog_kt: Some(9.0), cog_deg: Some(45.0), heading: Some(44), nav_status: 0 };
            vec![
                ais::encode_position_report(&v).unwrap().to_bits(),
                ais::encode_class_b(&v).unwrap().to_bits(),
                ais::encode_safety_broadcast(244_123_456, "MAN OVERBOARD").unwrap().to_bits(),
            ]
        }
        Protocol::Epirb => vec![
            epirb::encode_beacon(&BeaconMessage::maritime(244_123_456, 1, Some((52.0, 4.0)))).unwrap(),
            epirb::encode_beacon(&BeaconMessage::elt(227, 0x3C6444, None)).unwrap(),
        ],
        Protocol::Gdl90 => {
            let st = KinematicState { latitude: 45.0, longitude: -122.0, altitude_ft: 5000.0, callsign: "N12345".into(), ..Default::default() };
            vec![
                Bits::from_bytes(&gdl90::Heartbeat::default().to_message().to_bytes()),
                Bits::from_bytes(&gdl90::encode_traffic_report(0xABCDEF, &st).unwrap().to_bytes()),
            ]
        }
        Protocol::Ccsds => (0..3)
            .map(|i| {
                let payload: Vec<u8> = (0..r.gen_range(1..64)).map(|_| r.gen()).collect();
                Bits::from_bytes(&ccsds::encode_packet(&SpacePacket::telecommand(100 + i, i, payload)).unwrap())
            })
            .collect(),
    }
}

fn criterion_8() -> Outcome {
    const PER_INPUT: Duration = Duration::from_millis(50);
    let protocols = [Protocol::Adsb, Protocol::Ais, Protocol::Epirb, Protocol::Gdl90, Protocol::Ccsds];
    let per = 100_000 / protocols.len() as u64;
    let (mut total, mut crashes, mut slow) = (0u64, 0u64, 0u64);
    let mut slowest = Duration::ZERO;
    for (k, &p) in protocols.iter().enumerate() {
        let records = attack::fuzz(&corpus(p), p, per, 800 + k as u64).map_err(|e| e.to_string())?;
        for rec in &records {
            let t = Instant::now();
            let ok = catch_unwind(AssertUnwindSafe(|| {
                let d = decode_any(p, &rec.input, true);
                let _ = d.describe();
                if p == Protocol::Ais {
                    let _ = ais::decode_air(&rec.input, true);
                }
            }))
            .is_ok();
            let el = t.elapsed();
            slowest = slowest.max(el);
            crashes += u64::from(!ok);
            slow += u64::from(el > PER_INPUT);
            total += 1;
        }
    }
    check(total >= 100_000, || format!("only {total} inputs"))?;
    check(crashes == 0 && slow == 0, || format!("{crashes} crashes, {slow} inputs over {PER_INPUT:?}"))?;
    Ok(format!("{total} fuzzed inputs, 0 crashes, slowest {slowest:.1?}"))
}

// ---------------------------------------------------------------------------
// 9. Preamble sensitivity

fn criterion_9() -> Outcome {
    let sc = AttackScenario::new(Protocol::Ais, AttackKind::PreambleTest, 1.0);
    let out = gen_preamble_test(&sc, &TrainingPattern::default_sweep()).map_err(|e| e.to_string())?;
    let a = ReceiverModel::new(Protocol::Ais);
    let b = ReceiverModel { preamble_tolerance: 24, ..a.clone() };
    let ta = preamble_sensitivity(&a, out.schedule(), &out.air_variants).map_err(|e| e.to_string())?;
    let tb = preamble_sensitivity(&b, out.schedule(), &out.air_variants).map_err(|e| e.to_string())?;
    let differ: Vec<&str> = ta.iter().zip(&tb).filter(|(x, y)| x.decoded != y.decoded).map(|(x, _)| x.label.as_str()).collect();
    check(!differ.is_empty(), || "tables are identical".into())?;
    let count = |t: &[saamd::harness::loopback::PreambleRow]| t.iter().filter(|r| r.decoded).count();
    Ok(format!(
        "tolerance 0 decodes {}/{}, tolerance 24 decodes {}/{}; {} rows differ",
        count(&ta),
        ta.len(),
        count(&tb),
        tb.len(),
        differ.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("codec round trips", criterion_1),
        ("checksum oracles", criterion_2),
        ("CPR accuracy", criterion_3),
        ("modem loopback", criterion_4),
        ("attack determinism", criterion_5),
        ("harness DoS law", criterion_6),
        ("spoof fidelity", criterion_7),
        ("fuzzer robustness", criterion_8),
        ("preamble sensitivity", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let el = start.elapsed();
        match res {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{el:.1?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why}) [{el:.1?}]", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
