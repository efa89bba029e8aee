//! Byte-stream transport: anything `Read`/`Write` (files, sockets, pipes).

use std::io::{self, Read, Write};

use super::{frame, Gdl90Message, FLAG};

pub fn write_frames<W: Write>(mut w: W, messages: &[Gdl90Message]) -> io::Result<()> {
    for m in messages {
        w.write_all(&frame(m))?;
    }
    w.flush()
}

/// Splits a byte stream into flag-delimited frames (flags included). Bytes
/// outside any frame are dropped; back-to-back flags act as one separator.
pub struct FrameReader<R> {
    inner: R,
    buf: Vec<u8>,
    in_frame: bool,
    eof: bool,
}

impl<R: Read> FrameReader<R> {
    pub fn new(inner: R) -> Self {
        FrameReader { inner, buf: Vec::new(), in_frame: false, eof: false }
    }
}

impl<R: Read> Iterator for FrameReader<R> {
    type Item = io::Result<Vec<u8>>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut byte = [0u8; 1];
        while !self.eof {
            match self.inner.read(&mut byte) {
                Ok(0) => self.eof = true,
                Ok(_) => {
                    let b = byte[0];
                    if b == FLAG {
                        if self.in_frame && self.buf.len() > 1 {
                            self.buf.push(FLAG);
                            self.in_frame = false;
                            return Some(Ok(std::mem::take(&mut self.buf)));
                        }
                        self.buf.clear();
                        self.buf.push(FLAG);
                        self.in_frame = true;
                    } else if self.in_frame {
                        self.buf.push(b);
                    }
                }
                Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                Err(e) => return Some(Err(e)),
            }
        }
        // An unterminated tail is still handed out so the caller can diagnose it.
        if self.in_frame && self.buf.len() > 1 {
            self.in_frame = false;
            return Some(Ok(std::mem::take(&mut self.buf)));
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gdl90::{deframe, Heartbeat};

    #[test]
    fn stream_roundtrip() {
        let msgs = vec![
            Heartbeat { timestamp: 70_000, ..Default::default() }.to_message(),
            Gdl90Message { id: 20, payload: vec![0x7E; 27] },
        ];
        let mut buf = Vec::new();
        write_frames(&mut buf, &msgs).unwrap();
        buf.extend_from_slice(&[0x00, 0x7E, 0x01]);
        let frames: Vec<Vec<u8>> = FrameReader::new(buf.as_slice()).map(Result::unwrap).collect();
        assert_eq!(frames.len(), 3);
        for (f, m) in frames.iter().zip(&msgs) {
            assert_eq!(&deframe(f, false).message.unwrap(), m);
        }
        assert!(deframe(&frames[2], true).diagnosis.has("unterminated"));
    }
}
