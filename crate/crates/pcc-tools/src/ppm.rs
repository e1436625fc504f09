//! Binary PPM (P6) reading and writing.
//!
//! 8-bit images travel as maxval-255 files; 10-bit images as maxval-65535
//! files whose samples must all fit in [0, 1023], stored big-endian per the
//! format. File samples are interleaved R, G, B; the planar image keeps its
//! G, B, R internal order, so the translation happens here and only here.

use std::fs;
use std::io;
use std::path::Path;

use pcc_core::{Channel, ImageError, ImagePlanar};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PpmError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("not a binary PPM: expected magic \"P6\", found {found:?}")]
    BadMagic { found: String },
    #[error("malformed {field}: {reason}")]
    BadHeader { field: &'static str, reason: String },
    #[error("unsupported maxval {0}: only 255 (8-bit) and 65535 (10-bit payload) are supported")]
    UnsupportedMaxval(u32),
    #[error("sample {index} is {value}, beyond the 10-bit limit 1023 allowed in maxval-65535 files")]
    SampleOutOfRange { index: usize, value: u16 },
    #[error("payload truncated: raster needs {expected} bytes, file carries {found}")]
    Truncated { expected: usize, found: usize },
    #[error("{0} unexpected bytes after the raster")]
    TrailingBytes(usize),
    #[error("{0}")]
    Image(#[from] ImageError),
}

/// Parse a P6 file already in memory.
pub fn parse_ppm(bytes: &[u8]) -> Result<ImagePlanar, PpmError> {
    let mut cursor = Lexer { bytes, pos: 0 };
    cursor.expect_magic()?;
    let width = cursor.ascii_number("width")?;
    let height = cursor.ascii_number("height")?;
    let maxval = cursor.ascii_number("maxval")?;
    cursor.single_whitespace()?;

    if width == 0 || height == 0 {
        return Err(PpmError::BadHeader {
            field: "dimensions",
            reason: format!("{width}x{height} has no pixels"),
        });
    }
    let (bit_depth, bytes_per_sample) = match maxval {
        255 => (8u8, 1usize),
        65535 => (10, 2),
        other => return Err(PpmError::UnsupportedMaxval(other)),
    };

    let n = width as usize * height as usize;
    let expected = n * 3 * bytes_per_sample;
    let raster = &cursor.bytes[cursor.pos..];
    if raster.len() < expected {
        return Err(PpmError::Truncated {
            expected,
            found: raster.len(),
        });
    }
    if raster.len() > expected {
        return Err(PpmError::TrailingBytes(raster.len() - expected));
    }

    let mut planes: [Vec<u16>; 3] = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    // File pixel order is R, G, B; internal plane order is G, B, R.
    let file_to_plane = [Channel::R.index(), Channel::G.index(), Channel::B.index()];
    if bytes_per_sample == 1 {
        for (i, &byte) in raster.iter().enumerate() {
            planes[file_to_plane[i % 3]].push(byte as u16);
        }
    } else {
        for i in 0..n * 3 {
            let value = u16::from_be_bytes([raster[2 * i], raster[2 * i + 1]]);
            if value > 1023 {
                return Err(PpmError::SampleOutOfRange { index: i, value });
            }
            planes[file_to_plane[i % 3]].push(value);
        }
    }
    Ok(ImagePlanar::from_planes(width, height, bit_depth, planes)?)
}

/// Serialize to P6 bytes (maxval from the image's bit depth).
pub fn encode_ppm(image: &ImagePlanar) -> Vec<u8> {
    let maxval: u32 = if image.bit_depth() == 8 { 255 } else { 65535 };
    let mut out = format!(
        "P6\n{} {}\n{}\n",
        image.width(),
        image.height(),
        maxval
    )
    .into_bytes();
    let n = (image.width() * image.height()) as usize;
    let (r, g, b) = (
        image.plane(Channel::R),
        image.plane(Channel::G),
        image.plane(Channel::B),
    );
    for i in 0..n {
        for value in [r[i], g[i], b[i]] {
            if maxval == 255 {
                out.push(value as u8);
            } else {
                out.extend_from_slice(&value.to_be_bytes());
            }
        }
    }
    out
}

pub fn read_ppm(path: &Path) -> Result<ImagePlanar, PpmError> {
    parse_ppm(&fs::read(path)?)
}

pub fn write_ppm(image: &ImagePlanar, path: &Path) -> Result<(), PpmError> {
    Ok(fs::write(path, encode_ppm(image))?)
}

/// Minimal header lexer: magic, then ASCII decimal fields separated by
/// whitespace, with `#` comments running to end of line.
struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Lexer<'_> {
    fn expect_magic(&mut self) -> Result<(), PpmError> {
        if self.bytes.len() < 2 || &self.bytes[..2] != b"P6" {
            let found = self.bytes[..self.bytes.len().min(2)].to_vec();
            return Err(PpmError::BadMagic {
                found: String::from_utf8_lossy(&found).into_owned(),
            });
        }
        self.pos = 2;
        Ok(())
    }

    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' | 0x0b | 0x0c => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => return,
            }
        }
    }

    fn ascii_number(&mut self, field: &'static str) -> Result<u32, PpmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(PpmError::BadHeader {
                field,
                reason: match self.bytes.get(start) {
                    Some(&b) => format!("expected digits, found byte 0x{b:02x}"),
                    None => "header ended early".to_string(),
                },
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PpmError::BadHeader {
                field,
                reason: "value does not fit in 32 bits".to_string(),
            })
    }

    /// Exactly one whitespace byte separates the maxval from the raster.
    fn single_whitespace(&mut self) -> Result<(), PpmError> {
        match self.bytes.get(self.pos) {
            Some(b' ' | b'\t' | b'\r' | b'\n') => {
                self.pos += 1;
                Ok(())
            }
            other => Err(PpmError::BadHeader {
                field: "raster separator",
                reason: match other {
                    Some(&b) => format!("expected one whitespace byte, found 0x{b:02x}"),
                    None => "file ends at the header".to_string(),
                },
            }),
        }
    }
}
