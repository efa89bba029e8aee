//! Decoder diagnoses.
//!
//! Lenient decoders never fail; they return whatever they could recover plus a
//! `Diagnosis` listing what was wrong with the input. The harness aggregates
//! the issue keys into a histogram.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Issue {
    WrongLength { expected: usize, got: usize },
    CrcFailed,
    UnknownTypecode(u8),
    UnsupportedFormat(u8),
    FieldOutOfRange(String),
    BadBitSync,
    BadFrameSync,
    ShortFormat,
    UnknownProtocol(u8),
    Bch1Failed,
    Bch2Failed,
    NoStartFlag,
    NoEndFlag,
    StuffingViolation,
    PreambleRejected,
    Unterminated,
    BadEscape,
    TooShort,
    BadVersion,
    LengthMismatch,
    Truncated,
}

impl Issue {
    /// Stable snake_case key used in reports and histograms.
    pub fn key(&self) -> &'static str {
        match self {
            Issue::WrongLength { .. } => "wrong_length",
            Issue::CrcFailed => "crc_failed",
            Issue::UnknownTypecode(_) => "unknown_typecode",
            Issue::UnsupportedFormat(_) => "unsupported_format",
            Issue::FieldOutOfRange(_) => "field_out_of_range",
            Issue::BadBitSync => "bad_bit_sync",
            Issue::BadFrameSync => "bad_frame_sync",
            Issue::ShortFormat => "short_format",
            Issue::UnknownProtocol(_) => "unknown_protocol",
            Issue::Bch1Failed => "bch1_failed",
            Issue::Bch2Failed => "bch2_failed",
            Issue::NoStartFlag => "no_start_flag",
            Issue::NoEndFlag => "no_end_flag",
            Issue::StuffingViolation => "stuffing_violation",
            Issue::PreambleRejected => "preamble_rejected",
            Issue::Unterminated => "unterminated",
            Issue::BadEscape => "bad_escape",
            Issue::TooShort => "too_short",
            Issue::BadVersion => "bad_version",
            Issue::LengthMismatch => "length_mismatch",
            Issue::Truncated => "truncated",
        }
    }

    /// Integrity failures: the bits cannot be trusted at all.
    pub fn is_integrity(&self) -> bool {
        matches!(
            self,
            Issue::CrcFailed
                | Issue::Bch1Failed
                | Issue::Bch2Failed
                | Issue::WrongLength { .. }
                | Issue::NoStartFlag
                | Issue::NoEndFlag
                | Issue::PreambleRejected
                | Issue::Unterminated
                | Issue::BadEscape
                | Issue::TooShort
                | Issue::Truncated
                | Issue::BadBitSync
                | Issue::BadFrameSync
        )
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::WrongLength { expected, got } => write!(f, "wrong_length({got}, expected {expected})"),
            Issue::UnknownTypecode(t) => write!(f, "unknown_typecode({t})"),
            Issue::UnsupportedFormat(d) => write!(f, "unsupported_format({d})"),
            Issue::FieldOutOfRange(name) => write!(f, "field_out_of_range({name})"),
            Issue::UnknownProtocol(p) => write!(f, "unknown_protocol({p})"),
            other => f.write_str(other.key()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnosis {
    pub issues: Vec<Issue>,
}

impl Diagnosis {
    pub fn push(&mut self, issue: Issue) {
        if !self.issues.contains(&issue) {
            self.issues.push(issue);
        }
    }

    pub fn field(&mut self, name: impl Into<String>) {
        self.push(Issue::FieldOutOfRange(name.into()));
    }

    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has(&self, key: &str) -> bool {
        self.issues.iter().any(|i| i.key() == key)
    }

    pub fn integrity_failed(&self) -> bool {
        self.issues.iter().any(Issue::is_integrity)
    }

    pub fn fields_out_of_range(&self) -> Vec<&str> {
        self.issues
            .iter()
            .filter_map(|i| match i {
                Issue::FieldOutOfRange(n) => Some(n.as_str()),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return f.write_str("ok");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}
