//! Portable graymap (PGM) reading and writing.

use std::fs;
use std::path::Path;

use gfista::{Point, ScalarField};

#[derive(Debug, thiserror::Error)]
pub enum PgmError {
    #[error("PGM parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unsupported maxval {0} for writing; use 255 or 65535")]
    Maxval(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_error(offset: usize, message: impl Into<String>) -> PgmError {
    PgmError::Parse {
        offset,
        message: message.into(),
    }
}

/// Byte cursor over the header and ASCII payload, skipping `#` comments.
struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Next decimal token and the offset it starts at.
    fn unsigned(&mut self, what: &str) -> Result<(u32, usize), PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(match self.bytes.get(start) {
                Some(_) => parse_error(start, format!("expected {what}")),
                None => parse_error(start, format!("unexpected end of file, expected {what}")),
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .map(|v| (v, start))
            .ok_or_else(|| parse_error(start, format!("{what} out of range")))
    }
}

/// Decode a P2 or P5 graymap, scaling samples to `[0, 1]` by `1/maxval`.
pub fn parse_pgm(bytes: &[u8]) -> Result<ScalarField, PgmError> {
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(parse_error(0, "unsupported magic number; expected P2 or P5")),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if !cur.bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(parse_error(2, "expected whitespace after magic number"));
    }
    let (width, width_at) = cur.unsigned("width")?;
    let (height, _) = cur.unsigned("height")?;
    let (width, height) = (width as usize, height as usize);
    if width == 0 || height == 0 {
        return Err(parse_error(width_at, format!("empty image {width} x {height}")));
    }
    let (maxval, maxval_at) = cur.unsigned("maxval")?;
    if !(1..=65535).contains(&maxval) {
        return Err(parse_error(maxval_at, format!("maxval {maxval} outside 1..=65535")));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| parse_error(width_at, "image dimensions overflow"))?;
    let scale = 1.0 / maxval as f64;

    let mut values = Vec::with_capacity(count);
    if binary {
        if !cur.bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
            return Err(parse_error(cur.pos, "expected a single whitespace byte before the raster"));
        }
        let start = cur.pos + 1;
        let width_bytes = if maxval < 256 { 1 } else { 2 };
        let needed = count * width_bytes;
        let raster = bytes
            .get(start..start + needed)
            .ok_or_else(|| parse_error(bytes.len(), format!("truncated raster: need {needed} bytes after byte {start}")))?;
        for (i, chunk) in raster.chunks_exact(width_bytes).enumerate() {
            let sample = match chunk {
                [v] => *v as u32,
                [hi, lo] => u16::from_be_bytes([*hi, *lo]) as u32,
                _ => unreachable!("chunks have the sample width"),
            };
            if sample > maxval {
                return Err(parse_error(start + i * width_bytes, format!("sample {sample} exceeds maxval {maxval}")));
            }
            values.push(sample as f64 * scale);
        }
    } else {
        for _ in 0..count {
            let (sample, at) = cur.unsigned("sample")?;
            if sample > maxval {
                return Err(parse_error(at, format!("sample {sample} exceeds maxval {maxval}")));
            }
            values.push(sample as f64 * scale);
        }
    }
    ScalarField::from_vec(height, width, values).map_err(|e| parse_error(0, e.to_string()))
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<ScalarField, PgmError> {
    parse_pgm(&fs::read(path)?)
}

/// Encode as binary P5: values clamped to `[0, 1]`, quantized with
/// round-half-up `floor(v maxval + 1/2)`.
pub fn encode_pgm(field: &ScalarField, maxval: u32) -> Result<Vec<u8>, PgmError> {
    if maxval != 255 && maxval != 65535 {
        return Err(PgmError::Maxval(maxval));
    }
    let (rows, cols) = field.shape();
    let mut out = format!("P5\n{cols} {rows}\n{maxval}\n").into_bytes();
    for &v in field.as_slice() {
        let sample = (v.clamp(0.0, 1.0) * maxval as f64 + 0.5).floor() as u32;
        if maxval == 255 {
            out.push(sample as u8);
        } else {
            out.extend_from_slice(&(sample as u16).to_be_bytes());
        }
    }
    Ok(out)
}

pub fn save_pgm(field: &ScalarField, path: impl AsRef<Path>, maxval: u32) -> Result<(), PgmError> {
    fs::write(path, encode_pgm(field, maxval)?)?;
    Ok(())
}
