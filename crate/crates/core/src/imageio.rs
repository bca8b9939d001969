//! Binary PPM (P6, maxval 255) reading and writing.
//!
//! PPM stores pixels row by row with interleaved RGB; [`ColourImage`] is
//! channel-major, so both directions reshuffle the payload.

use crate::error::{Error, Result};
use crate::image::ColourImage;

pub fn read_ppm(bytes: &[u8]) -> Result<ColourImage> {
    let mut cur = Header { bytes, pos: 0 };
    let magic = cur.token()?;
    if magic != b"P6" {
        return Err(Error::MalformedHeader(format!(
            "magic {:?}, expected \"P6\"",
            String::from_utf8_lossy(magic)
        )));
    }
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    // exactly one whitespace byte separates maxval from the payload
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(Error::MalformedHeader("missing whitespace after maxval".into())),
    }
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!("zero dimension {width}x{height}")));
    }
    let (rows, cols) = (height as usize, width as usize);
    let want = rows
        .checked_mul(cols)
        .and_then(|v| v.checked_mul(3))
        .ok_or_else(|| Error::MalformedHeader(format!("dimensions {width}x{height} too large")))?;
    let payload = &bytes[cur.pos..];
    if payload.len() < want {
        return Err(Error::TruncatedPayload {
            expected: want,
            found: payload.len(),
        });
    }
    if payload.len() > want {
        return Err(Error::TrailingBytes(payload.len() - want));
    }
    let mn = rows * cols;
    let mut data = vec![0u8; want];
    for (px, rgb) in payload.chunks_exact(3).enumerate() {
        for (k, &v) in rgb.iter().enumerate() {
            data[k * mn + px] = v;
        }
    }
    ColourImage::new(rows, cols, data)
}

/// Canonical form: `P6\n<width> <height>\n255\n` then the interleaved payload.
pub fn write_ppm(img: &ColourImage) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", img.cols(), img.rows());
    let mn = img.pixel_count();
    let data = img.as_bytes();
    let mut out = Vec::with_capacity(header.len() + data.len());
    out.extend_from_slice(header.as_bytes());
    for px in 0..mn {
        out.extend_from_slice(&[data[px], data[mn + px], data[2 * mn + px]]);
    }
    out
}

pub fn solid_image(rows: usize, cols: usize, value: u8) -> Result<ColourImage> {
    ColourImage::solid(rows, cols, value)
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_blank(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a [u8]> {
        self.skip_blank();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::MalformedHeader("unexpected end of header".into()));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        let tok = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .filter(|s| s.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                Error::MalformedHeader(format!("bad {what} {:?}", String::from_utf8_lossy(tok)))
            })
    }
}
