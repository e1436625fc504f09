//! The bit-exact stream container.
//!
//! Layout (documented normatively in BITSTREAM.md):
//!
//! ```text
//! header  "PCC1" | version u8 | width u32 LE | height u32 LE
//!         | bit_depth u8 | cu_size u8 | iqp u8 | mode u8          = 17 bytes
//! body    per CU in raster order:
//!           se(off_g) se(off_b) se(off_r)
//!           then for each channel G, B, R:
//!             flag bit 0            -> all-zero coefficient block
//!             flag bit 1, ue(last), -> coded block: levels of zigzag
//!               se(level)×(last+1)     positions 0..=last, rest zero
//!         zero bits pad the body to a byte boundary
//! ```
//!
//! The level at the signalled last position must be nonzero (canonical
//! form); the reader rejects streams that violate it, along with nonzero
//! padding or trailing bytes.

use crate::bits::{BitReader, BitWriter, BitsError};
use crate::quant::LevelBlock;
use alloc::vec::Vec;
use core::fmt;

/// Magic bytes opening every stream.
pub const MAGIC: [u8; 4] = *b"PCC1";

/// The only container version this implementation reads or writes.
pub const VERSION: u8 = 1;

/// Fixed header length in bytes.
pub const HEADER_LEN: usize = 17;

/// Coding modes signalled in the header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodecMode {
    /// One QP for every channel of every CU; offsets are all zero.
    Uniform,
    /// Per-CU perceptual channel QP offsets.
    Pcc,
}

impl CodecMode {
    pub fn to_byte(self) -> u8 {
        match self {
            CodecMode::Uniform => 0,
            CodecMode::Pcc => 1,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(CodecMode::Uniform),
            1 => Some(CodecMode::Pcc),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamError {
    /// Fewer bytes than a header needs.
    TooShort { needed: usize, got: usize },
    BadMagic { got: [u8; 4] },
    UnsupportedVersion { got: u8 },
    /// A header field outside its domain; offset locates the field.
    InvalidHeaderField { field: &'static str, byte_offset: usize },
    /// Bit-level failure inside the body, at an absolute byte offset.
    Truncated { byte_offset: usize },
    CorruptCode { byte_offset: usize },
    /// ue(last) at or beyond the block's coefficient count.
    LastIndexOverflow { cu_index: usize, byte_offset: usize },
    /// The level at the signalled last position decoded to zero.
    NonCanonicalLevels { cu_index: usize, byte_offset: usize },
    /// A uniform-mode record carried a nonzero QP offset.
    NonZeroOffsetInUniform { cu_index: usize, byte_offset: usize },
    /// Body padding bits were not all zero.
    NonZeroPadding { byte_offset: usize },
    /// Bytes remain after the final CU and padding.
    TrailingBytes { expected_len: usize, actual_len: usize },
    /// Writer-side structural mismatch (wrong CU count or block size).
    Malformed { reason: &'static str },
}

impl fmt::Display for StreamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StreamError::TooShort { needed, got } => {
                write!(f, "stream is {got} bytes, header alone needs {needed}")
            }
            StreamError::BadMagic { got } => {
                write!(f, "bad magic {got:02x?}, expected \"PCC1\"")
            }
            StreamError::UnsupportedVersion { got } => {
                write!(f, "unsupported container version {got}")
            }
            StreamError::InvalidHeaderField { field, byte_offset } => {
                write!(f, "invalid header field {field} at byte {byte_offset}")
            }
            StreamError::Truncated { byte_offset } => {
                write!(f, "stream truncated near byte {byte_offset}")
            }
            StreamError::CorruptCode { byte_offset } => {
                write!(f, "corrupt entropy code near byte {byte_offset}")
            }
            StreamError::LastIndexOverflow { cu_index, byte_offset } => {
                write!(f, "CU {cu_index}: last-coefficient index out of range at byte {byte_offset}")
            }
            StreamError::NonCanonicalLevels { cu_index, byte_offset } => {
                write!(f, "CU {cu_index}: zero level at signalled last position, byte {byte_offset}")
            }
            StreamError::NonZeroOffsetInUniform { cu_index, byte_offset } => {
                write!(f, "CU {cu_index}: nonzero QP offset in uniform mode at byte {byte_offset}")
            }
            StreamError::NonZeroPadding { byte_offset } => {
                write!(f, "nonzero padding bits at byte {byte_offset}")
            }
            StreamError::TrailingBytes { expected_len, actual_len } => {
                write!(f, "{} trailing bytes after end of body ({expected_len} expected, {actual_len} present)", actual_len - expected_len)
            }
            StreamError::Malformed { reason } => write!(f, "malformed stream structure: {reason}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for StreamError {}

impl StreamError {
    fn from_bits(err: BitsError, body_start: usize) -> Self {
        match err {
            BitsError::Underflow { bit_offset } => StreamError::Truncated {
                byte_offset: body_start + bit_offset / 8,
            },
            BitsError::Overflow { bit_offset } => StreamError::CorruptCode {
                byte_offset: body_start + bit_offset / 8,
            },
        }
    }
}

/// Parsed fixed-size stream header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamHeader {
    pub width: u32,
    pub height: u32,
    pub bit_depth: u8,
    pub cu_size: u8,
    pub iqp: u8,
    pub mode: CodecMode,
}

impl StreamHeader {
    /// Validate field domains (nonzero dimensions, depth 8/10, CU size a
    /// power of two in [8, 64], QP in range).
    pub fn validate(&self) -> Result<(), StreamError> {
        if self.width == 0 || self.height == 0 {
            return Err(StreamError::InvalidHeaderField { field: "width/height", byte_offset: 5 });
        }
        if self.bit_depth != 8 && self.bit_depth != 10 {
            return Err(StreamError::InvalidHeaderField { field: "bit_depth", byte_offset: 13 });
        }
        let n = self.cu_size;
        if !(n.is_power_of_two() && (8..=64).contains(&n)) {
            return Err(StreamError::InvalidHeaderField { field: "cu_size", byte_offset: 14 });
        }
        if self.iqp > crate::quant::QP_MAX {
            return Err(StreamError::InvalidHeaderField { field: "iqp", byte_offset: 15 });
        }
        Ok(())
    }

    /// CU grid columns: `ceil(width / cu_size)`.
    pub fn cu_cols(&self) -> usize {
        (self.width as usize).div_ceil(self.cu_size as usize)
    }

    /// CU grid rows: `ceil(height / cu_size)`.
    pub fn cu_rows(&self) -> usize {
        (self.height as usize).div_ceil(self.cu_size as usize)
    }

    /// Total CU count in raster order.
    pub fn cu_count(&self) -> usize {
        self.cu_cols() * self.cu_rows()
    }

    fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&self.width.to_le_bytes());
        out.extend_from_slice(&self.height.to_le_bytes());
        out.push(self.bit_depth);
        out.push(self.cu_size);
        out.push(self.iqp);
        out.push(self.mode.to_byte());
    }

    fn read(bytes: &[u8]) -> Result<Self, StreamError> {
        if bytes.len() < HEADER_LEN {
            return Err(StreamError::TooShort { needed: HEADER_LEN, got: bytes.len() });
        }
        if bytes[0..4] != MAGIC {
            let mut got = [0u8; 4];
            got.copy_from_slice(&bytes[0..4]);
            return Err(StreamError::BadMagic { got });
        }
        if bytes[4] != VERSION {
            return Err(StreamError::UnsupportedVersion { got: bytes[4] });
        }
        let width = u32::from_le_bytes(bytes[5..9].try_into().unwrap());
        let height = u32::from_le_bytes(bytes[9..13].try_into().unwrap());
        let mode = CodecMode::from_byte(bytes[16])
            .ok_or(StreamError::InvalidHeaderField { field: "mode", byte_offset: 16 })?;
        let header = StreamHeader {
            width,
            height,
            bit_depth: bytes[13],
            cu_size: bytes[14],
            iqp: bytes[15],
            mode,
        };
        header.validate()?;
        Ok(header)
    }
}

/// One CU's payload: signed channel QP offsets and the quantized
/// coefficient blocks, both in G, B, R channel order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuRecord {
    pub offsets: [i32; 3],
    pub levels: [LevelBlock; 3],
}

/// A fully parsed (or about-to-be-written) stream.
#[derive(Debug, Clone, PartialEq)]
pub struct PccBitstream {
    pub header: StreamHeader,
    pub cus: Vec<CuRecord>,
}

/// Row-major indices of an N×N block in zigzag scan order: anti-diagonals
/// from DC outward, walking up-right on even diagonals and down-left on odd
/// ones (the classic JPEG pattern, generalized to N).
pub fn zigzag_order(n: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(n * n);
    for d in 0..(2 * n - 1) {
        let lo = d.saturating_sub(n - 1);
        let hi = d.min(n - 1);
        if d % 2 == 0 {
            for r in (lo..=hi).rev() {
                order.push(r * n + (d - r));
            }
        } else {
            for r in lo..=hi {
                order.push(r * n + (d - r));
            }
        }
    }
    order
}

/// Serialize a stream to bytes. Fails only on structural inconsistencies
/// (CU count or block sizes not matching the header, nonzero offsets in
/// uniform mode).
pub fn write_stream(stream: &PccBitstream) -> Result<Vec<u8>, StreamError> {
    let header = &stream.header;
    header.validate()?;
    if stream.cus.len() != header.cu_count() {
        return Err(StreamError::Malformed { reason: "CU record count does not match header" });
    }
    let n = header.cu_size as usize;
    let scan = zigzag_order(n);

    let mut out = Vec::new();
    header.write(&mut out);

    let mut body = BitWriter::new();
    for cu in &stream.cus {
        if header.mode == CodecMode::Uniform && cu.offsets != [0, 0, 0] {
            return Err(StreamError::Malformed { reason: "uniform mode requires zero offsets" });
        }
        for &off in &cu.offsets {
            body.write_se(off);
        }
        for block in &cu.levels {
            if block.size() != n {
                return Err(StreamError::Malformed { reason: "level block size does not match header" });
            }
            let levels = block.levels();
            let last = scan.iter().rposition(|&idx| levels[idx] != 0);
            match last {
                None => body.write_bit(false),
                Some(last) => {
                    body.write_bit(true);
                    body.write_ue(last as u32);
                    for &idx in &scan[..=last] {
                        body.write_se(levels[idx]);
                    }
                }
            }
        }
    }
    out.extend_from_slice(&body.into_bytes());
    Ok(out)
}

/// Parse a stream from bytes, enforcing every container invariant.
pub fn read_stream(bytes: &[u8]) -> Result<PccBitstream, StreamError> {
    let header = StreamHeader::read(bytes)?;
    let n = header.cu_size as usize;
    let coeff_count = n * n;
    let scan = zigzag_order(n);
    let body = &bytes[HEADER_LEN..];
    let mut reader = BitReader::new(body);
    let err_at = |e: BitsError| StreamError::from_bits(e, HEADER_LEN);
    let position = |r: &BitReader<'_>| HEADER_LEN + r.bit_position() / 8;

    let mut cus = Vec::new();
    for cu_index in 0..header.cu_count() {
        let mut offsets = [0i32; 3];
        for off in &mut offsets {
            let at = position(&reader);
            *off = reader.read_se().map_err(err_at)?;
            if header.mode == CodecMode::Uniform && *off != 0 {
                return Err(StreamError::NonZeroOffsetInUniform { cu_index, byte_offset: at });
            }
        }
        let mut levels = [LevelBlock::zeros(n), LevelBlock::zeros(n), LevelBlock::zeros(n)];
        for block in &mut levels {
            if !reader.read_bit().map_err(err_at)? {
                continue;
            }
            let at = position(&reader);
            let last = reader.read_ue().map_err(err_at)? as usize;
            if last >= coeff_count {
                return Err(StreamError::LastIndexOverflow { cu_index, byte_offset: at });
            }
            let out = block.levels_mut();
            let mut final_level = 0;
            for &idx in &scan[..=last] {
                final_level = reader.read_se().map_err(err_at)?;
                out[idx] = final_level;
            }
            if final_level == 0 {
                return Err(StreamError::NonCanonicalLevels {
                    cu_index,
                    byte_offset: position(&reader),
                });
            }
        }
        cus.push(CuRecord { offsets, levels });
    }

    let pad_at = position(&reader);
    reader
        .expect_zero_padding_to_byte()
        .map_err(|_| StreamError::NonZeroPadding { byte_offset: pad_at })?;
    if reader.remaining_bits() != 0 {
        return Err(StreamError::TrailingBytes {
            expected_len: HEADER_LEN + reader.bit_position() / 8,
            actual_len: bytes.len(),
        });
    }
    Ok(PccBitstream { header, cus })
}
