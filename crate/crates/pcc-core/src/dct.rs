//! Forward and inverse 2D orthonormal DCT-II on square blocks.
//!
//! The transform is separable: a 1D orthonormal DCT-II is applied to every
//! row and then to every column. With the orthonormal scaling the matrix is
//! its own inverse transpose, Parseval's identity holds, and a constant
//! block of value `v` transforms to a single DC coefficient `N·v`.

use crate::math;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

/// Block edge lengths the transform supports.
pub const SUPPORTED_SIZES: [usize; 5] = [4, 8, 16, 32, 64];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformError {
    UnsupportedSize(usize),
    SizeMismatch { expected: usize, got: usize },
}

impl fmt::Display for TransformError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformError::UnsupportedSize(n) => {
                write!(f, "unsupported transform size {n} (expected 4, 8, 16, 32 or 64)")
            }
            TransformError::SizeMismatch { expected, got } => {
                write!(f, "block has {got} samples, transform expects {expected}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for TransformError {}

/// N×N real transform coefficients in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffBlock {
    size: usize,
    values: Vec<f64>,
}

impl CoeffBlock {
    pub fn new(size: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), size * size, "coefficient count must be size^2");
        Self { size, values }
    }

    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            values: vec![0.0; size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// Precomputed basis for one block size.
///
/// `basis[k * n + j] = a(k) · cos(π·(2j+1)·k / 2n)` with `a(0) = √(1/n)` and
/// `a(k) = √(2/n)` otherwise.
#[derive(Debug, Clone)]
pub struct Dct2d {
    n: usize,
    basis: Vec<f64>,
}

impl Dct2d {
    pub fn new(n: usize) -> Result<Self, TransformError> {
        if !SUPPORTED_SIZES.contains(&n) {
            return Err(TransformError::UnsupportedSize(n));
        }
        let mut basis = vec![0.0; n * n];
        let norm_dc = math::sqrt(1.0 / n as f64);
        let norm_ac = math::sqrt(2.0 / n as f64);
        for k in 0..n {
            let scale = if k == 0 { norm_dc } else { norm_ac };
            for j in 0..n {
                let angle = PI * (2 * j + 1) as f64 * k as f64 / (2 * n) as f64;
                basis[k * n + j] = scale * math::cos(angle);
            }
        }
        Ok(Self { n, basis })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `out = B · input · Bᵀ`, writing into a caller-provided buffer.
    pub fn forward_into(&self, input: &[f64], out: &mut [f64]) -> Result<(), TransformError> {
        self.apply(input, out, false)
    }

    /// `out = Bᵀ · input · B`, writing into a caller-provided buffer.
    pub fn inverse_into(&self, input: &[f64], out: &mut [f64]) -> Result<(), TransformError> {
        self.apply(input, out, true)
    }

    /// Forward transform of centered spatial samples.
    pub fn forward(&self, input: &[f64]) -> Result<CoeffBlock, TransformError> {
        let mut out = CoeffBlock::zeros(self.n);
        self.forward_into(input, &mut out.values)?;
        Ok(out)
    }

    /// Inverse transform back to centered spatial samples.
    pub fn inverse(&self, coeffs: &CoeffBlock) -> Result<Vec<f64>, TransformError> {
        if coeffs.size != self.n {
            return Err(TransformError::SizeMismatch {
                expected: self.n * self.n,
                got: coeffs.size * coeffs.size,
            });
        }
        let mut out = vec![0.0; self.n * self.n];
        self.inverse_into(&coeffs.values, &mut out)?;
        Ok(out)
    }

    fn apply(&self, input: &[f64], out: &mut [f64], transpose: bool) -> Result<(), TransformError> {
        let n = self.n;
        if input.len() != n * n {
            return Err(TransformError::SizeMismatch {
                expected: n * n,
                got: input.len(),
            });
        }
        assert_eq!(out.len(), n * n, "output buffer must hold size^2 values");
        // Row pass: tmp = input · Mᵀ where M is the (possibly transposed) basis.
        let mut tmp = vec![0.0; n * n];
        for r in 0..n {
            let row = &input[r * n..(r + 1) * n];
            for k in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    let m = if transpose { self.basis[j * n + k] } else { self.basis[k * n + j] };
                    acc += m * row[j];
                }
                tmp[r * n + k] = acc;
            }
        }
        // Column pass: out = M · tmp.
        for k in 0..n {
            for c in 0..n {
                let mut acc = 0.0;
                for r in 0..n {
                    let m = if transpose { self.basis[r * n + k] } else { self.basis[k * n + r] };
                    acc += m * tmp[r * n + c];
                }
                out[k * n + c] = acc;
            }
        }
        Ok(())
    }
}

/// Value subtracted from every sample before the forward transform.
pub fn center_offset(bit_depth: u8) -> f64 {
    (1u32 << (bit_depth - 1)) as f64
}

/// Center integer samples around zero for the transform.
pub fn center_samples(samples: &[u16], bit_depth: u8, out: &mut [f64]) {
    let offset = center_offset(bit_depth);
    for (dst, &s) in out.iter_mut().zip(samples) {
        *dst = s as f64 - offset;
    }
}

/// Undo centering, round to nearest integer and clamp to the sample range.
pub fn reconstruct_samples(spatial: &[f64], bit_depth: u8, out: &mut [u16]) {
    let offset = center_offset(bit_depth);
    let max = ((1u32 << bit_depth) - 1) as f64;
    for (dst, &v) in out.iter_mut().zip(spatial) {
        let r = math::round(v + offset);
        *dst = if r <= 0.0 {
            0
        } else if r >= max {
            max as u16
        } else {
            r as u16
        };
    }
}
