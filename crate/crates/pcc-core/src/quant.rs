//! QP/QStep mapping and deadzone scalar quantization.
//!
//! Quantizer step sizes follow the familiar exponential law in which the
//! step doubles every six QP units: `qstep(q) = 2^((q - 4) / 6)`. Channel
//! QP offsets are folded into the integer QP before the exponential map,
//! and every effective QP is clamped to the `[0, 51]` range.

use crate::dct::CoeffBlock;
use crate::image::Channel;
use crate::math;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Smallest and largest representable QP.
pub const QP_MIN: u8 = 0;
pub const QP_MAX: u8 = 51;

/// Deadzone rounding offset applied inside the quantizer.
pub const DEADZONE_OFFSET: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuantError {
    QpOutOfRange(i64),
    NonPositiveStep,
}

impl fmt::Display for QuantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantError::QpOutOfRange(q) => {
                write!(f, "QP {q} outside the supported range [{QP_MIN}, {QP_MAX}]")
            }
            QuantError::NonPositiveStep => write!(f, "quantizer step must be positive and finite"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for QuantError {}

/// Step size for an integer QP: `2^((q - 4) / 6)`.
pub fn qstep_from_qp(q: u8) -> Result<f64, QuantError> {
    if q > QP_MAX {
        return Err(QuantError::QpOutOfRange(q as i64));
    }
    Ok(math::exp2((q as f64 - 4.0) / 6.0))
}

/// Integer QP nearest to a step size: `round(6·log2(s)) + 4`, clamped.
pub fn qp_from_qstep(s: f64) -> Result<u8, QuantError> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(QuantError::NonPositiveStep);
    }
    let q = math::round(6.0 * math::log2(s)) + 4.0;
    Ok(if q <= QP_MIN as f64 {
        QP_MIN
    } else if q >= QP_MAX as f64 {
        QP_MAX
    } else {
        q as u8
    })
}

/// Per-CU quantization state: the frame-level initial QP plus the cumulative
/// signed per-channel offsets accumulated by the perceptual control loop.
///
/// Effective channel QPs (`iqp + offset`, clamped to `[0, 51]`) are always
/// derived on demand, so the clamp invariant cannot be violated by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QpState {
    iqp: u8,
    off_g: i32,
    off_b: i32,
    off_r: i32,
}

impl QpState {
    /// Uniform state at the initial QP with zero offsets.
    pub fn new(iqp: u8) -> Result<Self, QuantError> {
        if iqp > QP_MAX {
            return Err(QuantError::QpOutOfRange(iqp as i64));
        }
        Ok(Self {
            iqp,
            off_g: 0,
            off_b: 0,
            off_r: 0,
        })
    }

    /// State with explicit offsets (as decoded from a bitstream).
    pub fn with_offsets(iqp: u8, off_g: i32, off_b: i32, off_r: i32) -> Result<Self, QuantError> {
        let mut s = Self::new(iqp)?;
        s.off_g = off_g;
        s.off_b = off_b;
        s.off_r = off_r;
        Ok(s)
    }

    pub fn iqp(&self) -> u8 {
        self.iqp
    }

    pub fn offset(&self, ch: Channel) -> i32 {
        match ch {
            Channel::G => self.off_g,
            Channel::B => self.off_b,
            Channel::R => self.off_r,
        }
    }

    pub fn off_g(&self) -> i32 {
        self.off_g
    }

    pub fn off_b(&self) -> i32 {
        self.off_b
    }

    pub fn off_r(&self) -> i32 {
        self.off_r
    }

    /// Effective QP for a channel, clamped into `[0, 51]`.
    pub fn effective_qp(&self, ch: Channel) -> u8 {
        let q = self.iqp as i32 + self.offset(ch);
        q.clamp(QP_MIN as i32, QP_MAX as i32) as u8
    }

    /// Step size for a channel's effective QP.
    pub fn qstep(&self, ch: Channel) -> f64 {
        // Effective QP is clamped, so the map cannot fail.
        qstep_from_qp(self.effective_qp(ch)).unwrap()
    }

    /// Whether a further step of `dir` (+1 or -1) would leave the channel's
    /// effective QP unchanged because it is pinned at the range boundary.
    pub fn saturated(&self, ch: Channel, dir: i32) -> bool {
        let q = self.iqp as i32 + self.offset(ch);
        (dir > 0 && q >= QP_MAX as i32) || (dir < 0 && q <= QP_MIN as i32)
    }

    /// The state after one unit QP step on `ch`, or `None` when the channel
    /// is saturated in that direction (the offset stops accumulating at the
    /// clamp boundary so that signalled offsets always reflect real QP
    /// movement).
    pub fn stepped(&self, ch: Channel, dir: i32) -> Option<Self> {
        debug_assert!(dir == 1 || dir == -1, "steps are unit sized");
        if self.saturated(ch, dir) {
            return None;
        }
        let mut next = *self;
        match ch {
            Channel::G => next.off_g += dir,
            Channel::B => next.off_b += dir,
            Channel::R => next.off_r += dir,
        }
        Some(next)
    }
}

/// N×N integer quantization levels in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelBlock {
    size: usize,
    levels: Vec<i32>,
}

impl LevelBlock {
    pub fn new(size: usize, levels: Vec<i32>) -> Self {
        assert_eq!(levels.len(), size * size, "level count must be size^2");
        Self { size, levels }
    }

    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            levels: vec![0; size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn levels(&self) -> &[i32] {
        &self.levels
    }

    pub fn levels_mut(&mut self) -> &mut [i32] {
        &mut self.levels
    }

    pub fn is_all_zero(&self) -> bool {
        self.levels.iter().all(|&l| l == 0)
    }
}

/// Deadzone quantization of one coefficient: `sign(c)·floor(|c|/s + f)`.
#[inline]
pub fn quantize_coeff(c: f64, s: f64) -> i32 {
    let magnitude = math::floor(math::abs(c) / s + DEADZONE_OFFSET);
    let level = magnitude as i32;
    if c < 0.0 {
        -level
    } else {
        level
    }
}

/// Quantize a coefficient slice into a caller-provided level buffer.
pub fn quantize_into(coeffs: &[f64], s: f64, out: &mut [i32]) -> Result<(), QuantError> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(QuantError::NonPositiveStep);
    }
    for (dst, &c) in out.iter_mut().zip(coeffs) {
        *dst = quantize_coeff(c, s);
    }
    Ok(())
}

/// Deadzone quantization of a whole coefficient block.
pub fn quantize_block(coeffs: &CoeffBlock, s: f64) -> Result<LevelBlock, QuantError> {
    let mut out = LevelBlock::zeros(coeffs.size());
    quantize_into(coeffs.values(), s, &mut out.levels)?;
    Ok(out)
}

/// Reconstruct coefficients from levels: `c' = level · s`.
pub fn dequantize_into(levels: &[i32], s: f64, out: &mut [f64]) -> Result<(), QuantError> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(QuantError::NonPositiveStep);
    }
    for (dst, &l) in out.iter_mut().zip(levels) {
        *dst = l as f64 * s;
    }
    Ok(())
}

/// Reconstruct a whole coefficient block from levels.
pub fn dequantize_block(levels: &LevelBlock, s: f64) -> Result<CoeffBlock, QuantError> {
    let mut out = CoeffBlock::zeros(levels.size());
    dequantize_into(&levels.levels, s, out.values_mut())?;
    Ok(out)
}
