//! PBM (`P1`, `P4`) and PGM (`P2`, `P5`) decoding into luminance rasters.
//!
//! PBM bit 1 is black and becomes luminance 0. PGM samples are rescaled from
//! `0..=maxval` to `0..=255`. Only the first image of a multi-image file is
//! read.

use crate::error::{Error, Result};
use crate::grid::Raster;

const MAX_DIMENSION: usize = 65535;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    PlainPbm,
    PlainPgm,
    RawPbm,
    RawPgm,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, reason: impl Into<String>) -> Error {
        Error::parse(self.line, reason)
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
        }
        Some(b)
    }

    /// Skips whitespace and `#` comments.
    fn skip_ws(&mut self) {
        while let Some(b) = self.peek() {
            if b == b'#' {
                while let Some(c) = self.bump() {
                    if c == b'\n' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.bump();
        }
        if start == self.pos {
            return Err(match self.peek() {
                None => self.err(format!("unexpected end of data reading {what}")),
                Some(b) => self.err(format!("expected {what}, found byte {b:#04x}")),
            });
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        digits
            .parse::<usize>()
            .ok()
            .filter(|&v| v <= MAX_DIMENSION)
            .ok_or_else(|| self.err(format!("{what} {digits} exceeds {MAX_DIMENSION}")))
    }
}

fn scale(sample: usize, maxval: usize) -> u8 {
    ((sample * 255 + maxval / 2) / maxval) as u8
}

pub fn parse_netpbm(bytes: &[u8]) -> Result<Raster> {
    let kind = match bytes.get(..2) {
        Some(b"P1") => Kind::PlainPbm,
        Some(b"P2") => Kind::PlainPgm,
        Some(b"P4") => Kind::RawPbm,
        Some(b"P5") => Kind::RawPgm,
        _ => return Err(Error::parse(1, "bad magic: expected P1, P2, P4 or P5")),
    };
    let mut cur = Cursor {
        bytes,
        pos: 2,
        line: 1,
    };
    if !cur
        .peek()
        .is_some_and(|b| b.is_ascii_whitespace() || b == b'#')
    {
        return Err(cur.err("magic must be followed by whitespace"));
    }
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    if width == 0 || height == 0 {
        return Err(cur.err(format!("empty image {width}x{height}")));
    }
    let maxval = match kind {
        Kind::PlainPgm | Kind::RawPgm => {
            let m = cur.number("maxval")?;
            if m == 0 {
                return Err(cur.err("maxval must be at least 1"));
            }
            m
        }
        _ => 1,
    };
    let count = width
        .checked_mul(height)
        .ok_or_else(|| cur.err("image dimensions overflow"))?;
    let mut pixels = Vec::with_capacity(count);

    match kind {
        Kind::PlainPbm => {
            // Samples may be packed without separators.
            while pixels.len() < count {
                cur.skip_ws();
                match cur.bump() {
                    Some(b'0') => pixels.push(255),
                    Some(b'1') => pixels.push(0),
                    Some(b) => return Err(cur.err(format!("invalid PBM sample byte {b:#04x}"))),
                    None => {
                        return Err(cur.err(format!(
                            "truncated data: {} of {count} samples",
                            pixels.len()
                        )))
                    }
                }
            }
        }
        Kind::PlainPgm => {
            while pixels.len() < count {
                cur.skip_ws();
                if cur.peek().is_none() {
                    return Err(cur.err(format!(
                        "truncated data: {} of {count} samples",
                        pixels.len()
                    )));
                }
                let v = cur.number("sample")?;
                if v > maxval {
                    return Err(cur.err(format!("sample {v} exceeds maxval {maxval}")));
                }
                pixels.push(scale(v, maxval));
            }
        }
        Kind::RawPbm | Kind::RawPgm => {
            if !cur.bump().is_some_and(|b| b.is_ascii_whitespace()) {
                return Err(cur.err("expected a single whitespace byte before raster data"));
            }
            let data = &bytes[cur.pos..];
            if kind == Kind::RawPbm {
                let stride = width.div_ceil(8);
                let need = stride * height;
                if data.len() < need {
                    return Err(cur.err(format!("truncated data: {} of {need} bytes", data.len())));
                }
                for row in data[..need].chunks(stride) {
                    for x in 0..width {
                        let bit = (row[x / 8] >> (7 - x % 8)) & 1;
                        pixels.push(if bit == 1 { 0 } else { 255 });
                    }
                }
            } else {
                let wide = maxval > 255;
                let bps = if wide { 2 } else { 1 };
                let need = count * bps;
                if data.len() < need {
                    return Err(cur.err(format!("truncated data: {} of {need} bytes", data.len())));
                }
                for s in data[..need].chunks(bps) {
                    let v = if wide {
                        usize::from(u16::from_be_bytes([s[0], s[1]]))
                    } else {
                        usize::from(s[0])
                    };
                    if v > maxval {
                        return Err(cur.err(format!("sample {v} exceeds maxval {maxval}")));
                    }
                    pixels.push(scale(v, maxval));
                }
            }
        }
    }
    Raster::new(width, height, pixels)
}
