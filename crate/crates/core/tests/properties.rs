//! Invariants across the public API, checked on generated inputs.

use std::collections::BTreeMap;

use proptest::prelude::*;
use saamd::adsb::{self, CprFormat, KinematicState, ModeSFrame};
use saamd::ais::{self, air, nmea, Channel, VesselReport};
use saamd::attack::{self, fields, gen_flood, AttackKind, AttackScenario, RawValue};
use saamd::ccsds::{self, sequence::EntryContent, Mutation, SpacePacket};
use saamd::decode::decode_any;
use saamd::epirb::{self, BeaconMessage};
use saamd::gdl90;
use saamd::harness::{self, HarnessInput, ReceiverModel};
use saamd::modem::{self, ModemConfig};
use saamd::{Bits, FrameSchedule, Protocol};

fn position_frame(icao: u32, lat: f64, lon: f64, odd: bool) -> ModeSFrame {
    let st = KinematicState { latitude: lat, longitude: lon, altitude_ft: 10_000.0, ..Default::default() };
    let fmt = if odd { CprFormat::Odd } else { CprFormat::Even };
    adsb::encode_airborne_position(icao, &st, fmt).unwrap()
}

fn flood(rate: f64, n: usize, duration: f64, seed: u64) -> FrameSchedule {
    let s = AttackScenario::new(Protocol::Adsb, AttackKind::Flooding, duration).with_rate(rate).with_seed(seed);
    gen_flood(&s, n).unwrap().schedule.unwrap()
}

/// A flood with every `every`-th frame corrupted by one bit flip.
fn dirty_flood(rate: f64, n: usize, seed: u64, every: usize) -> FrameSchedule {
    let mut s = flood(rate, n, 3.0, seed);
    for (i, e) in s.entries.iter_mut().enumerate() {
        if every > 0 && i % every == 0 {
            let k = (i * 37) % e.frame.bits.len();
            e.frame.bits[k] = !e.frame.bits[k];
        }
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adsb_single_bit_flip_fails_strict(icao in 0u32..1 << 24, lat in -80.0f64..80.0, lon in -180.0f64..180.0, k in 0usize..112) {
        let mut bits = position_frame(icao, lat, lon, false).to_bits();
        prop_assert!(ModeSFrame::from_bits(&bits).unwrap().crc_ok());
        bits[k] = !bits[k];
        let d = adsb::decode_frame(&bits, true);
        prop_assert!(d.message.is_none());
        prop_assert!(d.diagnosis.integrity_failed());
    }

    #[test]
    fn ais_stuffing_never_leaves_six_ones(data in prop::collection::vec(any::<bool>(), 0..400)) {
        let stuffed = air::stuff(&data);
        prop_assert!(!stuffed.windows(6).any(|w| w.iter().all(|&b| b)));
        prop_assert_eq!(air::unstuff(&stuffed).unwrap().to_vec(), data);
    }

    #[test]
    fn ais_nrzi_round_trip(data in prop::collection::vec(any::<bool>(), 0..400)) {
        prop_assert_eq!(air::nrzi_decode(&air::nrzi_encode(&data)).to_vec(), data);
    }

    #[test]
    fn ais_frames_and_sentences(mmsi in 1u32..1 << 30, lat in -90.0f64..90.0, lon in -180.0f64..180.0, sog in 0.0f64..100.0) {
        let r = VesselReport { mmsi, lat: Some(lat), lon: Some(lon), sog_kt: Some(sog), ..Default::default() };
        let m = ais::encode_position_report(&r).unwrap();
        let frame = m.air_frame(&Default::default()).to_bits();
        let d = air::deframe(&frame, false);
        prop_assert!(d.diagnosis.is_empty());
        prop_assert_eq!(d.data.unwrap(), m.to_bits());

        let lines: Vec<String> = nmea::build_aivdm_sentences(&m, Channel::A, 0).iter().map(ToString::to_string).collect();
        for l in &lines {
            let (body, sum) = l[1..].split_once('*').unwrap();
            prop_assert_eq!(u8::from_str_radix(sum, 16).unwrap(), nmea::checksum(body));
        }
        let back = nmea::decode_aivdm(lines.iter().map(String::as_str)).unwrap();
        prop_assert_eq!(back.len(), 1);
        prop_assert_eq!(back[0].message.as_ref(), Some(&m));
    }

    #[test]
    fn epirb_protected_bit_flip_is_detected(mmsi in 200_000_000u32..800_000_000, lat in -89.0f64..89.0, lon in -179.0f64..179.0, k in 24usize..144) {
        let mut bits = epirb::encode_beacon(&BeaconMessage::maritime(mmsi, 1, Some((lat, lon)))).unwrap();
        prop_assert!(!epirb::decode_beacon(&bits, false).diagnosis.integrity_failed());
        bits[k] = !bits[k];
        prop_assert!(epirb::decode_beacon(&bits, true).diagnosis.integrity_failed());
    }

    #[test]
    fn gdl90_framing(body in prop::collection::vec(any::<u8>(), 1..64)) {
        let framed = gdl90::frame_bytes(&body);
        prop_assert_eq!(framed[0], 0x7E);
        prop_assert_eq!(*framed.last().unwrap(), 0x7E);
        let inner = &framed[1..framed.len() - 1];
        prop_assert!(!inner.contains(&0x7E));
        prop_assert!(inner.iter().enumerate().all(|(i, &b)| b != 0x7D || inner.get(i + 1).is_some_and(|n| n ^ 0x20 == 0x7E || n ^ 0x20 == 0x7D)));
        let d = gdl90::deframe(&framed, false);
        prop_assert!(d.diagnosis.is_empty());
        prop_assert_eq!(d.message.unwrap().to_bytes(), body);
    }

    #[test]
    fn gdl90_deframe_is_total(bytes in prop::collection::vec(any::<u8>(), 0..128), lenient in any::<bool>()) {
        let _ = gdl90::deframe(&bytes, lenient);
    }

    #[test]
    fn ccsds_sequences(apid in 0u16..=ccsds::MAX_APID, payload in prop::collection::vec(any::<u8>(), 1..64), seed in any::<u64>()) {
        let t = SpacePacket::telecommand(apid, 0, payload);
        let muts = [Mutation::Replay(2), Mutation::SeqJump, Mutation::LengthMismatch, Mutation::BadVersion, Mutation::Truncate, Mutation::RandomPayload];
        let a = ccsds::build_dos_sequence(&t, &muts, seed);
        prop_assert_eq!(&a, &ccsds::build_dos_sequence(&t, &muts, seed));
        for e in &a.entries {
            match &e.content {
                EntryContent::Packet(p) => prop_assert_eq!(ccsds::decode_packet(&e.bytes(), true).packet, Some(p.clone())),
                EntryContent::Raw(b) => prop_assert!(!ccsds::decode_packet(b, true).diagnosis.is_empty()),
            }
        }
    }

    #[test]
    fn modem_samples_stay_under_peak(bits in prop::collection::vec(any::<bool>(), 1..200), peak in 0.05f32..2.0) {
        let cfg = ModemConfig { peak, ..Default::default() };
        for p in [Protocol::Adsb, Protocol::Ais, Protocol::Epirb] {
            let s = modem::burst(p, &bits, &cfg).unwrap();
            prop_assert!(s.iter().all(|c| c.norm() <= peak * (1.0 + 1e-5)), "{p} exceeds peak");
        }
    }

    #[test]
    fn override_frames_keep_valid_checksums(
        icao in 0u32..1 << 24,
        lat in -80.0f64..80.0,
        lon in -180.0f64..180.0,
        pick in any::<prop::sample::Index>(),
        value in any::<u64>(),
    ) {
        let frames = [
            (Protocol::Adsb, position_frame(icao, lat, lon, true).to_bits()),
            (Protocol::Epirb, epirb::encode_beacon(&BeaconMessage::maritime(244_000_000 + icao % 1000, 1, Some((lat, lon)))).unwrap()),
            (
                Protocol::Gdl90,
                Bits::from_bytes(&gdl90::frame(
                    &gdl90::encode_traffic_report(icao, &KinematicState { latitude: lat, longitude: lon, ..Default::default() }).unwrap(),
                )),
            ),
        ];
        for (p, frame) in frames {
            let msg = if p == Protocol::Gdl90 {
                Bits::from_bytes(&gdl90::deframe(&frame.to_bytes(), false).message.unwrap().to_bytes())
            } else {
                frame.clone()
            };
            let candidates: Vec<_> = fields::field_map(p)
                .iter()
                .filter(|f| (f.applies)(&msg) && !["parity", "bch1", "bch2", "format", "id", "bit_sync", "frame_sync"].contains(&f.name))
                .collect();
            let f = pick.get(&candidates);
            let overrides = BTreeMap::from([(f.name.to_string(), RawValue::Int((value & f.max()) as i64))]);
            let out = fields::override_frame(p, &frame, &overrides).unwrap().unwrap();
            prop_assert!(!decode_any(p, &out, true).diagnosis.integrity_failed(), "{p} {} broke integrity", f.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn schedules_honor_rate(rate in 1.0f64..400.0, duration in 1.0f64..10.0, n in 1usize..40, seed in any::<u64>()) {
        let s = flood(rate, n, duration, seed);
        let want = rate * duration;
        prop_assert!((s.len() as f64 - want).abs() <= 1.0, "{} frames for {want}", s.len());
        prop_assert!(s.entries.windows(2).all(|w| w[0].timestamp_us <= w[1].timestamp_us));
    }

    #[test]
    fn harness_conserves_and_is_monotone(rate in 50.0f64..800.0, n in 1usize..60, seed in any::<u64>(), every in 0usize..6, b in 1u32..400, extra in 1u32..400) {
        let s = dirty_flood(rate, n, seed, every);
        let lo = ReceiverModel { per_second_budget: b, ..ReceiverModel::new(Protocol::Adsb) };
        let hi = ReceiverModel { per_second_budget: b + extra, ..lo.clone() };
        let a = harness::run(&lo, HarnessInput::Schedule(&s), None).unwrap();
        let c = harness::run(&hi, HarnessInput::Schedule(&s), None).unwrap();
        for r in [&a, &c] {
            prop_assert_eq!(r.input_count, s.len() as u64);
            prop_assert_eq!(r.decoded_count + r.crc_fail_count + r.messages_dropped, r.input_count);
        }
        prop_assert!(c.messages_dropped <= a.messages_dropped);
        prop_assert_eq!(&a, &harness::run(&lo, HarnessInput::Schedule(&s), None).unwrap());
    }

    #[test]
    fn generation_is_deterministic(pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let entries = attack::catalog();
        let s = pick.get(&entries).scenario.clone().with_seed(seed);
        prop_assert_eq!(attack::generate(&s).unwrap(), attack::generate(&s).unwrap());
    }
}
