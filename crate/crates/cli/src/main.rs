//! `saamd`: encode, modulate, attack, fuzz and stress-test datalink receivers.

mod lines;

use std::collections::BTreeMap;
use std::fmt::{self, Display, Write as _};
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use saamd::ais::{self, sixbit, AivdmSentence, Channel};
use saamd::attack::{self, fields, fuzz, AttackError, AttackScenario, RawValue};
use saamd::decode::decode_any;
use saamd::harness::loopback::{preamble_sensitivity, verify_loopback};
use saamd::harness::{self, HarnessError, HarnessInput, ReceiverModel, Verdict};
use saamd::modem::{self, IqBuffer, IqFormat, ModemConfig, ModemError};
use saamd::{gdl90, Bits, FrameSchedule, Protocol};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "saamd", version, about = "Datalink attack generation and receiver stress testing")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// key=value message lines to a replay file.
    Encode(EncodeArgs),
    /// Replay, hex or AIVDM input to a decoded dump.
    Decode(DecodeArgs),
    /// Replay file to an IQ file (with .meta sidecar).
    Modulate(ModulateArgs),
    /// IQ file to a replay file.
    Demodulate(DemodulateArgs),
    /// Run an attack scenario into an output directory.
    Attack(AttackArgs),
    /// Mutation campaign over a corpus, or check a log against it.
    Fuzz(FuzzArgs),
    /// Drive receiver models with a replay or IQ input.
    Harness(HarnessArgs),
    /// Modulate, demodulate and compare a scenario's frames.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    protocol: Protocol,
    /// Message lines; stdin when absent.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Set a named raw field after encoding, e.g. callsign=0xFFFFFFFFFFFF.
    #[arg(long = "raw-override", value_name = "FIELD=VALUE")]
    raw_override: Vec<String>,
    /// Emit AIVDM sentences instead of a replay file (AIS only).
    #[arg(long)]
    aivdm: bool,
}

#[derive(Args)]
struct DecodeArgs {
    /// Needed only when the input has no protocol header and is not AIVDM.
    #[arg(long)]
    protocol: Option<Protocol>,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit 1 if any frame fails integrity or field validation.
    #[arg(long, conflicts_with = "lenient")]
    strict: bool,
    /// Report what can be recovered from damaged frames (default).
    #[arg(long)]
    lenient: bool,
    /// Print a reconnaissance inventory instead of per-frame lines.
    #[arg(long, conflicts_with = "emit_replay")]
    inventory: bool,
    /// Re-emit the accepted frames as a replay file.
    #[arg(long)]
    emit_replay: bool,
}

#[derive(Args)]
struct ModulateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Sample rate in Hz; the waveform's default when absent.
    #[arg(long)]
    rate: Option<f64>,
    /// cf32 or cs8; taken from the output extension when absent.
    #[arg(long)]
    format: Option<IqFormat>,
    /// Add white noise at this SNR (dB).
    #[arg(long)]
    snr: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DemodulateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Inferred from the center frequency in the .meta sidecar when absent.
    #[arg(long)]
    protocol: Option<Protocol>,
    #[arg(long)]
    format: Option<IqFormat>,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also write the modulated baseband (always written for jamming).
    #[arg(long)]
    iq: bool,
    #[arg(long, default_value = "cf32")]
    format: IqFormat,
}

#[derive(Args)]
struct FuzzArgs {
    /// Directory of seed inputs: hex/replay lines or raw binary, sorted by name.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    protocol: Protocol,
    #[arg(long, default_value_t = 1000)]
    iterations: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Check that every record of this log replays to its logged input.
    #[arg(long, conflicts_with = "out")]
    replay_log: Option<PathBuf>,
}

#[derive(Args)]
struct HarnessArgs {
    /// Receiver model TOML; repeat for a fleet run.
    #[arg(long, required = true)]
    model: Vec<PathBuf>,
    /// Replay file, or an IQ file (.cf32/.cs8) with its .meta.
    #[arg(long)]
    input: PathBuf,
    /// Override the wall-clock span in seconds.
    #[arg(long)]
    wall: Option<f64>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    /// AIS air-frame variants (from `attack`) for a preamble sensitivity table.
    #[arg(long)]
    variants: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: PathBuf,
    /// Noise level in dB; noiseless when absent.
    #[arg(long)]
    snr: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug)]
struct Fail {
    code: u8,
    msg: String,
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

fn usage(e: impl Display) -> Fail {
    Fail { code: EXIT_USAGE, msg: e.to_string() }
}

fn io_err(path: &Path, e: impl Display) -> Fail {
    Fail { code: EXIT_IO, msg: format!("{}: {e}", path.display()) }
}

impl From<ModemError> for Fail {
    fn from(e: ModemError) -> Self {
        let code = match e {
            ModemError::Io(_) | ModemError::Meta(_) => EXIT_IO,
            _ => EXIT_USAGE,
        };
        Fail { code, msg: e.to_string() }
    }
}

impl From<AttackError> for Fail {
    fn from(e: AttackError) -> Self {
        match e {
            AttackError::Modem(m) => m.into(),
            e => usage(e),
        }
    }
}

impl From<HarnessError> for Fail {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Modem(m) => m.into(),
            e => usage(e),
        }
    }
}

impl Display for Fail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

type Res<T> = Result<T, Fail>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Encode(a) => encode(a),
        Cmd::Decode(a) => decode(a),
        Cmd::Modulate(a) => modulate(a),
        Cmd::Demodulate(a) => demodulate(a),
        Cmd::Attack(a) => attack_cmd(a),
        Cmd::Fuzz(a) => fuzz_cmd(a),
        Cmd::Harness(a) => harness_cmd(a),
        Cmd::Verify(a) => verify(a),
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("saamd: {f}");
            ExitCode::from(f.code)
        }
    }
}

fn read_text(path: Option<&Path>) -> Res<String> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| io_err(p, e)),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| io_err(Path::new("<stdin>"), e))?;
            Ok(s)
        }
    }
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, data: &[u8]) -> Res<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(path, e))?;
    tmp.write_all(data).map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Res<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| io_err(Path::new("<stdout>"), e)),
    }
}

fn parse_overrides(items: &[String]) -> Res<BTreeMap<String, RawValue>> {
    items
        .iter()
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("--raw-override {kv:?}: expected FIELD=VALUE")))?;
            let v: RawValue = v.parse().map_err(|e| usage(format!("--raw-override {k}: {e}")))?;
            Ok((k.to_string(), v))
        })
        .collect()
}

fn encode(a: EncodeArgs) -> Res<u8> {
    let p = a.protocol;
    if a.aivdm && p != Protocol::Ais {
        return Err(usage("--aivdm needs --protocol ais"));
    }
    let overrides = parse_overrides(&a.raw_override)?;
    fields::check_names(p, &overrides).map_err(usage)?;
    let text = read_text(a.input.as_deref())?;
    let mut sched = FrameSchedule::new(p);
    let mut next_us = 0u64;
    for (n, line) in text.lines().enumerate() {
        let Some(e) = lines::encode_line(p, line).map_err(|m| usage(format!("line {}: {m}", n + 1)))? else {
            continue;
        };
        let ts = e.t.map_or(next_us, |t| (t * 1e6).round() as u64);
        let mut bits = e.bits;
        if !overrides.is_empty() {
            bits = fields::override_frame(p, &bits, &overrides)?
                .ok_or_else(|| usage(format!("line {}: overridden field not present in this message", n + 1)))?;
        }
        sched.push(ts, 0, bits);
        next_us = ts + lines::default_spacing_us(p);
    }
    sched.sort();
    if a.aivdm {
        let mut out = String::new();
        for (i, e) in sched.entries.iter().enumerate() {
            let (payload, fill) = sixbit::armor_6bit(&e.frame.bits);
            for s in ais::nmea::build_from_payload(&payload, fill, Channel::A, i as u8) {
                let _ = writeln!(out, "{s}");
            }
        }
        return emit(a.out.as_deref(), &out).map(|_| 0);
    }
    emit(a.out.as_deref(), &sched.to_replay()).map(|_| 0)
}

/// AIVDM sentences reassembled into message bits, one per 100 ms.
fn aivdm_schedule(text: &str) -> Res<FrameSchedule> {
    let mut sched = FrameSchedule::new(Protocol::Ais);
    let mut pending: Vec<AivdmSentence> = Vec::new();
    for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let s: AivdmSentence = line.trim().parse().map_err(|e| usage(format!("line {}: {e}", n + 1)))?;
        if s.number as usize != pending.len() + 1 {
            return Err(usage(format!("line {}: fragment {} out of order", n + 1, s.number)));
        }
        let done = s.number == s.total;
        pending.push(s);
        if done {
            let payload: String = pending.iter().map(|p| p.payload.as_str()).collect();
            let fill = pending.last().map_or(0, |p| p.fill);
            let bits = sixbit::dearmor_6bit(&payload, fill).map_err(|e| usage(format!("line {}: {e}", n + 1)))?;
            let ts = sched.len() as u64 * lines::default_spacing_us(Protocol::Ais);
            sched.push(ts, 0, bits);
            pending.clear();
        }
    }
    if !pending.is_empty() {
        return Err(usage("incomplete multi-part AIVDM message at end of input"));
    }
    Ok(sched)
}

fn read_schedule(text: &str, protocol: Option<Protocol>) -> Res<FrameSchedule> {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#'));
    if first.is_some_and(|l| l.starts_with('!') || l.starts_with('$')) {
        if protocol.is_some_and(|p| p != Protocol::Ais) {
            return Err(usage("AIVDM input is AIS"));
        }
        return aivdm_schedule(text);
    }
    FrameSchedule::from_replay(text, protocol).map_err(usage)
}

fn decode(a: DecodeArgs) -> Res<u8> {
    let text = read_text(a.input.as_deref())?;
    let sched = read_schedule(&text, a.protocol)?;
    let p = sched.protocol;
    if a.inventory {
        let inv = attack::recon::inventory_schedule(&sched);
        emit(a.out.as_deref(), &inv.to_table())?;
        return Ok(0);
    }
    let mut out = String::new();
    let mut kept = FrameSchedule::new(p);
    let mut failures = 0;
    for e in &sched.entries {
        let d = decode_any(p, &e.frame.bits, !a.strict);
        let ok = d.has_message() && (!a.strict || d.diagnosis.is_empty());
        if ok {
            kept.push(e.timestamp_us, e.transmitter, e.frame.bits.clone());
        } else {
            failures += 1;
        }
        let mut line = format!("@{} {}", e.timestamp_us, d.describe());
        if !ok {
            let _ = write!(line, " REJECTED: {}", d.diagnosis);
        }
        let _ = writeln!(out, "{line}");
    }
    if a.emit_replay {
        emit(a.out.as_deref(), &kept.to_replay())?;
    } else {
        emit(a.out.as_deref(), &out)?;
    }
    if a.strict && failures > 0 {
        eprintln!("saamd: {failures} of {} frames failed strict decoding", sched.len());
        return Ok(EXIT_FAIL);
    }
    Ok(0)
}

fn modem_config(protocol: Protocol, rate: Option<f64>) -> Res<ModemConfig> {
    let mut cfg = ModemConfig::default();
    if let Some(r) = rate {
        match protocol {
            Protocol::Adsb => cfg.ppm_rate = r,
            Protocol::Ais => cfg.gmsk_rate = r,
            Protocol::Epirb => cfg.biphase_rate = r,
            p => return Err(ModemError::Unsupported(p).into()),
        }
    }
    Ok(cfg)
}

fn iq_format(explicit: Option<IqFormat>, path: &Path) -> IqFormat {
    explicit.or_else(|| IqFormat::from_path(path)).unwrap_or(IqFormat::Cf32)
}

fn modulate(a: ModulateArgs) -> Res<u8> {
    let sched = FrameSchedule::from_replay(&read_text(Some(&a.input))?, None).map_err(usage)?;
    let cfg = modem_config(sched.protocol, a.rate)?;
    let mut iq = modem::modulate_schedule(&sched, &cfg)?;
    if let Some(snr) = a.snr {
        modem::add_awgn(&mut iq, snr, cfg.peak, a.seed);
    }
    modem::iq_write(&iq, &a.out, iq_format(a.format, &a.out))?;
    eprintln!("{} frames, {} samples at {} Hz", sched.len(), iq.len(), iq.sample_rate);
    Ok(0)
}

fn protocol_for_iq(iq: &IqBuffer) -> Option<Protocol> {
    [Protocol::Adsb, Protocol::Ais, Protocol::Epirb]
        .into_iter()
        .find(|p| modem::center_freq(*p) == iq.center_freq_label)
}

fn read_iq(path: &Path, format: Option<IqFormat>, protocol: Option<Protocol>) -> Res<(Protocol, IqBuffer, ModemConfig)> {
    let iq = modem::iq_read(path, iq_format(format, path))?;
    let p = protocol
        .or_else(|| protocol_for_iq(&iq))
        .ok_or_else(|| usage(format!("cannot tell the protocol of {}; pass --protocol", path.display())))?;
    let cfg = modem_config(p, Some(iq.sample_rate))?;
    Ok((p, iq, cfg))
}

fn demodulate(a: DemodulateArgs) -> Res<u8> {
    let (p, iq, cfg) = read_iq(&a.input, a.format, a.protocol)?;
    cfg.sample_rate(p)?;
    let mut sched = FrameSchedule::new(p);
    for (t, bits) in modem::demodulate_stream(p, &iq, &cfg) {
        sched.push(t, 0, bits);
    }
    emit(a.out.as_deref(), &sched.to_replay())?;
    Ok(0)
}

#[derive(Serialize)]
struct Manifest {
    protocol: Protocol,
    attack: String,
    seed: u64,
    config: String,
    config_sha256: String,
    outputs: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct VariantsFile<'a> {
    variant: &'a [attack::AirVariant],
}

fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

fn attack_cmd(a: AttackArgs) -> Res<u8> {
    let text = read_text(Some(&a.config))?;
    let s = AttackScenario::from_toml(&text)?;
    let out = attack::generate(&s)?;
    fs::create_dir_all(&a.out).map_err(|e| io_err(&a.out, e))?;

    let mut files: Vec<(&str, Vec<u8>)> = vec![("scenario.toml", s.to_toml().into_bytes())];
    if let Some(sched) = &out.schedule {
        files.push(("schedule.replay", sched.to_replay().into_bytes()));
    }
    if !out.air_variants.is_empty() {
        let v = toml::to_string(&VariantsFile { variant: &out.air_variants }).map_err(usage)?;
        files.push(("variants.toml", v.into_bytes()));
    }
    if !out.truth.is_empty() {
        let mut t = String::from("timestamp_us\tid\tlat\tlon\talt_ft\n");
        for p in &out.truth {
            let alt = p.altitude_ft.map_or("-".into(), |a| format!("{a:.1}"));
            let _ = writeln!(t, "{}\t{}\t{:.7}\t{:.7}\t{alt}", p.timestamp_us, p.id, p.latitude, p.longitude);
        }
        files.push(("truth.tsv", t.into_bytes()));
    }
    if !out.fuzz_log.is_empty() {
        let log: String = out.fuzz_log.iter().map(|r| r.log_line() + "\n").collect();
        files.push(("fuzz.log", log.into_bytes()));
    }
    if let Some(inv) = &out.inventory {
        files.push(("inventory.tsv", inv.to_table().into_bytes()));
    }

    let mut outputs = BTreeMap::new();
    for (name, data) in &files {
        write_atomic(&a.out.join(name), data)?;
        outputs.insert(name.to_string(), sha256_hex(data));
    }
    if a.iq || out.iq.is_some() {
        if let Some(iq) = out.modulate(&ModemConfig::default())? {
            let path = a.out.join(format!("baseband.{}", a.format));
            modem::iq_write(&iq, &path, a.format)?;
            for p in [path.clone(), modem::iq::meta_path(&path)] {
                let bytes = fs::read(&p).map_err(|e| io_err(&p, e))?;
                let file = p.file_name().expect("joined path").to_string_lossy().into_owned();
                outputs.insert(file, sha256_hex(&bytes));
            }
        }
    }
    let m = Manifest {
        protocol: s.protocol,
        attack: s.attack.name().to_string(),
        seed: s.seed,
        config: "scenario.toml".into(),
        config_sha256: s.config_hash(),
        outputs,
    };
    let manifest = toml::to_string(&m).map_err(usage)?;
    write_atomic(&a.out.join("manifest.toml"), manifest.as_bytes())?;
    println!(
        "{} {}: {} frames -> {}",
        s.protocol,
        s.attack.name(),
        out.schedule.as_ref().map_or(0, FrameSchedule::len),
        a.out.display()
    );
    Ok(0)
}

/// Corpus entries in file-name order. Text files hold one hex or replay
/// frame per line; anything else is one binary entry. GDL-90 entries that
/// start with a flag byte are deframed to message bytes.
fn read_corpus(dir: &Path, protocol: Protocol) -> Res<Vec<Bits>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for path in paths {
        let data = fs::read(&path).map_err(|e| io_err(&path, e))?;
        let as_text = std::str::from_utf8(&data).ok().and_then(|t| {
            t.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| saamd::frame::parse_replay_line(l).map(|r| r.bits))
                .collect::<Result<Vec<_>, _>>()
                .ok()
        });
        let entries = match as_text {
            Some(v) if !v.is_empty() => v,
            _ => vec![Bits::from_bytes(&data)],
        };
        for b in entries {
            if protocol == Protocol::Gdl90 && b.len() >= 8 && b.to_bytes()[0] == 0x7E {
                match gdl90::deframe(&b.to_bytes(), true).message {
                    Some(m) => out.push(Bits::from_bytes(&m.to_bytes())),
                    None => return Err(usage(format!("{}: undecodable GDL-90 frame", path.display()))),
                }
            } else {
                out.push(b);
            }
        }
    }
    Ok(out)
}

fn fuzz_cmd(a: FuzzArgs) -> Res<u8> {
    let corpus = read_corpus(&a.corpus, a.protocol)?;
    if let Some(log) = &a.replay_log {
        let text = read_text(Some(log))?;
        let mut n = 0;
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#')) {
            let rec = attack::FuzzRecord::parse_log_line(line).map_err(|e| usage(format!("line {}: {e}", i + 1)))?;
            let got = fuzz::replay(&corpus, a.protocol, &rec)?;
            if got != rec.input {
                println!("line {}: iteration {} replays to {}", i + 1, rec.iteration, got.to_hex());
                return Ok(EXIT_FAIL);
            }
            n += 1;
        }
        println!("{n} records replay identically");
        return Ok(0);
    }
    let records = attack::fuzz(&corpus, a.protocol, a.iterations, a.seed)?;
    let mut log = format!(
        "# protocol={} seed={} iterations={} corpus={}\n",
        a.protocol,
        a.seed,
        a.iterations,
        corpus.len()
    );
    let mut accepted = 0;
    for r in &records {
        log.push_str(&r.log_line());
        log.push('\n');
        if decode_any(a.protocol, &r.input, true).has_message() {
            accepted += 1;
        }
    }
    emit(a.out.as_deref(), &log)?;
    eprintln!("{} inputs, {accepted} still decode leniently", records.len());
    Ok(0)
}

#[derive(serde::Deserialize)]
struct VariantsIn {
    variant: Vec<attack::AirVariant>,
}

fn harness_cmd(a: HarnessArgs) -> Res<u8> {
    let models = a
        .model
        .iter()
        .map(|p| ReceiverModel::from_toml(&read_text(Some(p))?).map_err(|e| usage(format!("{}: {e}", p.display()))))
        .collect::<Res<Vec<_>>>()?;

    if IqFormat::from_path(&a.input).is_some() {
        if models.len() != 1 {
            return Err(usage("IQ input takes a single --model"));
        }
        let (_, iq, _) = read_iq(&a.input, None, Some(models[0].protocol))?;
        let r = harness::run(&models[0], HarnessInput::Iq(&iq), a.wall)?;
        return single_report(&a, &r);
    }

    let sched = FrameSchedule::from_replay(&read_text(Some(&a.input))?, None).map_err(usage)?;
    if let Some(vpath) = &a.variants {
        let v: VariantsIn = toml::from_str(&read_text(Some(vpath))?).map_err(|e| usage(format!("{}: {e}", vpath.display())))?;
        let mut table = String::from("label\ttraining_bits\tinverted\tmeasured");
        let mut cols = Vec::new();
        for (i, m) in models.iter().enumerate() {
            let _ = write!(table, "\tmodel{i}");
            cols.push(preamble_sensitivity(m, &sched, &v.variant)?);
        }
        table.push('\n');
        for (j, row) in cols[0].iter().enumerate() {
            let _ = write!(table, "{}\t{}\t{}\t{}", row.label, row.training_bits, row.inverted, row.measured_training);
            for c in &cols {
                table.push_str(if c[j].decoded { "\tdecoded" } else { "\tmissed" });
            }
            table.push('\n');
        }
        emit(a.report.as_deref(), &table)?;
        return Ok(0);
    }

    if models.len() == 1 {
        let r = harness::run(&models[0], HarnessInput::Schedule(&sched), a.wall)?;
        return single_report(&a, &r);
    }
    let fleet = harness::fleet_run(&models, &sched, a.wall)?;
    let text = if a.json {
        serde_json::to_string_pretty(&fleet).map_err(usage)? + "\n"
    } else {
        let mut t = String::new();
        for (path, r) in a.model.iter().zip(&fleet.reports) {
            let _ = writeln!(t, "{}\tverdict={}\tdrop_ratio={:.4}", path.display(), r.verdict.name(), r.drop_ratio());
        }
        let _ = writeln!(t, "affected={}/{}\naffected_fraction={:.4}", fleet.affected, fleet.total, fleet.affected_fraction);
        t
    };
    emit(a.report.as_deref(), &text)?;
    let dos = fleet.reports.iter().any(|r| r.verdict == Verdict::Dos);
    Ok(if dos { EXIT_FAIL } else { 0 })
}

fn single_report(a: &HarnessArgs, r: &harness::HarnessReport) -> Res<u8> {
    let text = if a.json { serde_json::to_string_pretty(r).map_err(usage)? + "\n" } else { r.to_text() };
    emit(a.report.as_deref(), &text)?;
    Ok(if r.verdict == Verdict::Dos { EXIT_FAIL } else { 0 })
}

fn verify(a: VerifyArgs) -> Res<u8> {
    let s = AttackScenario::from_toml(&read_text(Some(&a.config))?)?;
    let out = attack::generate(&s)?;
    let Some(sched) = &out.schedule else {
        return Err(usage(format!("{} produces a waveform, not frames", s.attack.name())));
    };
    let r = verify_loopback(sched, &ModemConfig::default(), a.snr, a.seed)?;
    let mut t = format!(
        "protocol={}\nframes={}\nrecovered={}\nsnr_db={}\nresult={}\n",
        r.protocol,
        r.frames,
        r.recovered,
        r.snr_db.map_or("none".into(), |v| v.to_string()),
        if r.pass { "pass" } else { "fail" }
    );
    for d in &r.diffs {
        let _ = writeln!(
            t,
            "diff index={} t={} reason={:?} expected={} received={}",
            d.index,
            d.timestamp_us,
            d.reason,
            d.expected,
            d.received.as_deref().unwrap_or("-")
        );
    }
    emit(a.report.as_deref(), &t)?;
    Ok(if r.pass { 0 } else { EXIT_FAIL })
}
