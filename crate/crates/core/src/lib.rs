//! Protocol codecs, baseband modems, attack generators and a receiver test
//! harness for ADS-B, AIS, EPIRB, GDL-90 and CCSDS space packets.

pub mod adsb;
pub mod attack;
pub mod ais;
pub mod bits;
pub mod ccsds;
pub mod decode;
pub mod diag;
pub mod epirb;
pub mod frame;
pub mod gdl90;
pub mod harness;
pub mod modem;

pub use bits::Bits;
pub use diag::{Diagnosis, Issue};
pub use frame::{Frame, FrameSchedule, Protocol, ScheduledFrame};
