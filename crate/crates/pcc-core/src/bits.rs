//! MSB-first bit packing and order-0 exponential-Golomb codes.
//!
//! `ue(v)` writes `v + 1` in binary preceded by one zero bit per digit
//! after the first; `se(v)` maps signed values onto the unsigned code with
//! `v ≤ 0 → -2v` and `v > 0 → 2v - 1`. Both are prefix-free, so the reader
//! needs no length information.

use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitsError {
    /// Ran off the end of the buffer; offset is in bits from the start.
    Underflow { bit_offset: usize },
    /// A code too long to be valid (corrupt prefix).
    Overflow { bit_offset: usize },
}

impl BitsError {
    /// Byte offset of the error position (rounded down).
    pub fn byte_offset(&self) -> usize {
        match self {
            BitsError::Underflow { bit_offset } | BitsError::Overflow { bit_offset } => {
                bit_offset / 8
            }
        }
    }
}

impl fmt::Display for BitsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BitsError::Underflow { bit_offset } => {
                write!(f, "bitstream ends early at bit {bit_offset}")
            }
            BitsError::Overflow { bit_offset } => {
                write!(f, "exp-Golomb code at bit {bit_offset} is too long to be valid")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for BitsError {}

/// Append-only MSB-first bit sink.
#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    /// Unwritten bits remaining in the final byte (0 means byte-aligned).
    free: u8,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of bits written so far.
    pub fn len_bits(&self) -> usize {
        // `free` counts unwritten bits in the tail byte.
        self.bytes.len() * 8 - self.free as usize
    }

    pub fn write_bit(&mut self, bit: bool) {
        if self.free == 0 {
            self.bytes.push(0);
            self.free = 8;
        }
        if bit {
            let idx = self.bytes.len() - 1;
            self.bytes[idx] |= 1 << (self.free - 1);
        }
        self.free -= 1;
    }

    /// Write the low `count` bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u64, count: u32) {
        debug_assert!(count <= 64);
        for i in (0..count).rev() {
            self.write_bit((value >> i) & 1 == 1);
        }
    }

    /// Unsigned order-0 exp-Golomb code.
    pub fn write_ue(&mut self, v: u32) {
        let payload = v as u64 + 1;
        let width = 64 - payload.leading_zeros();
        self.write_bits(0, width - 1);
        self.write_bits(payload, width);
    }

    /// Signed order-0 exp-Golomb code.
    pub fn write_se(&mut self, v: i32) {
        let mapped = if v <= 0 {
            (-(v as i64) * 2) as u32
        } else {
            (v as u32) * 2 - 1
        };
        self.write_ue(mapped);
    }

    /// Pad with zero bits to the next byte boundary.
    pub fn align(&mut self) {
        self.free = 0;
    }

    /// Finish, padding the final partial byte with zero bits.
    pub fn into_bytes(mut self) -> Vec<u8> {
        self.align();
        self.bytes
    }
}

/// MSB-first bit source over a byte slice.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    /// Current position in bits from the start of the slice.
    pub fn bit_position(&self) -> usize {
        self.pos
    }

    /// Bits left before the end of the slice.
    pub fn remaining_bits(&self) -> usize {
        self.bytes.len() * 8 - self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool, BitsError> {
        let byte = self.pos / 8;
        if byte >= self.bytes.len() {
            return Err(BitsError::Underflow { bit_offset: self.pos });
        }
        let bit = (self.bytes[byte] >> (7 - (self.pos % 8))) & 1;
        self.pos += 1;
        Ok(bit == 1)
    }

    /// Read `count` bits, MSB first.
    pub fn read_bits(&mut self, count: u32) -> Result<u64, BitsError> {
        debug_assert!(count <= 64);
        let mut acc = 0u64;
        for _ in 0..count {
            acc = (acc << 1) | self.read_bit()? as u64;
        }
        Ok(acc)
    }

    /// Decode an unsigned exp-Golomb code.
    pub fn read_ue(&mut self) -> Result<u32, BitsError> {
        let start = self.pos;
        let mut zeros = 0u32;
        while !self.read_bit()? {
            zeros += 1;
            if zeros > 31 {
                return Err(BitsError::Overflow { bit_offset: start });
            }
        }
        let tail = self.read_bits(zeros)?;
        let payload = (1u64 << zeros) | tail;
        Ok((payload - 1) as u32)
    }

    /// Decode a signed exp-Golomb code.
    pub fn read_se(&mut self) -> Result<i32, BitsError> {
        let mapped = self.read_ue()? as i64;
        Ok(if mapped % 2 == 0 {
            (-mapped / 2) as i32
        } else {
            ((mapped + 1) / 2) as i32
        })
    }

    /// Skip zero padding to the next byte boundary, failing if any padding
    /// bit is set.
    pub fn expect_zero_padding_to_byte(&mut self) -> Result<(), BitsError> {
        while self.pos % 8 != 0 {
            let at = self.pos;
            if self.read_bit()? {
                return Err(BitsError::Overflow { bit_offset: at });
            }
        }
        Ok(())
    }
}
