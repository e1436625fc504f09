//! Objective quality and rate measures: SSIM, MS-SSIM, PSNR and BPP.
//!
//! SSIM follows the original single-scale definition: an 11×11 Gaussian
//! window with σ = 1.5, K1 = 0.01, K2 = 0.03, statistics taken over valid
//! window positions only (no padding). MS-SSIM uses the standard five
//! dyadic scales with exponents (0.0448, 0.2856, 0.3001, 0.2363, 0.1333),
//! 2×2 mean downsampling between scales, and the luminance term applied at
//! the coarsest scale only. Color images score each channel independently
//! and average the three results with equal weight.

use crate::container::{StreamHeader, HEADER_LEN};
use crate::image::{Channel, ImagePlanar};
use crate::math;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// SSIM window edge length.
pub const SSIM_WINDOW: usize = 11;
/// Gaussian window standard deviation.
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

/// Per-scale exponents of the five-scale MS-SSIM.
pub const MS_SSIM_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];

/// Minimum image side so that the coarsest of the five dyadic scales still
/// fits an 11×11 window: 11 · 2^4 = 176.
pub const MS_SSIM_MIN_SIDE: u32 = 176;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricsError {
    DimensionMismatch {
        ref_dims: (u32, u32),
        test_dims: (u32, u32),
    },
    BitDepthMismatch {
        ref_depth: u8,
        test_depth: u8,
    },
    /// Image too small for the requested measure.
    TooSmall {
        side: u32,
        required: u32,
    },
    /// Stream header does not describe the given image.
    StreamImageMismatch,
    /// Stream too short to carry a header.
    StreamTooShort,
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::DimensionMismatch { ref_dims, test_dims } => write!(
                f,
                "image dimensions differ: {}x{} vs {}x{}",
                ref_dims.0, ref_dims.1, test_dims.0, test_dims.1
            ),
            MetricsError::BitDepthMismatch { ref_depth, test_depth } => {
                write!(f, "bit depths differ: {ref_depth} vs {test_depth}")
            }
            MetricsError::TooSmall { side, required } => {
                write!(f, "image side {side} below required minimum {required}")
            }
            MetricsError::StreamImageMismatch => {
                write!(f, "stream header does not match image dimensions")
            }
            MetricsError::StreamTooShort => write!(f, "stream shorter than a header"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MetricsError {}

/// PSNR of one channel: finite dB, or a distinguished lossless marker when
/// the planes are identical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Lossless,
    Db(f64),
}

impl Psnr {
    /// The dB value, mapping lossless to +∞.
    pub fn db(&self) -> f64 {
        match self {
            Psnr::Lossless => f64::INFINITY,
            Psnr::Db(v) => *v,
        }
    }
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Lossless => write!(f, "lossless"),
            Psnr::Db(v) => write!(f, "{v:.4} dB"),
        }
    }
}

/// Per-channel and mean PSNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsnrReport {
    pub g: Psnr,
    pub b: Psnr,
    pub r: Psnr,
    /// PSNR of the channel-averaged MSE.
    pub mean: Psnr,
}

fn check_compatible(a: &ImagePlanar, b: &ImagePlanar) -> Result<(), MetricsError> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(MetricsError::DimensionMismatch {
            ref_dims: (a.width(), a.height()),
            test_dims: (b.width(), b.height()),
        });
    }
    if a.bit_depth() != b.bit_depth() {
        return Err(MetricsError::BitDepthMismatch {
            ref_depth: a.bit_depth(),
            test_depth: b.bit_depth(),
        });
    }
    Ok(())
}

/// Bits per pixel of a serialized stream relative to the image it encodes:
/// `8 · bytes / (width · height)`. The stream header must agree with the
/// image's dimensions.
pub fn bpp(stream_bytes: &[u8], image: &ImagePlanar) -> Result<f64, MetricsError> {
    if stream_bytes.len() < HEADER_LEN {
        return Err(MetricsError::StreamTooShort);
    }
    let width = u32::from_le_bytes(stream_bytes[5..9].try_into().unwrap());
    let height = u32::from_le_bytes(stream_bytes[9..13].try_into().unwrap());
    if width != image.width() || height != image.height() {
        return Err(MetricsError::StreamImageMismatch);
    }
    Ok(8.0 * stream_bytes.len() as f64 / (width as f64 * height as f64))
}

/// BPP directly from a parsed header and byte length (no image needed).
pub fn bpp_from_len(header: &StreamHeader, byte_len: usize) -> f64 {
    8.0 * byte_len as f64 / (header.width as f64 * header.height as f64)
}

// ---------------------------------------------------------------------------
// Plane machinery shared by SSIM and MS-SSIM.

/// A float plane with explicit dimensions.
struct PlaneF {
    w: usize,
    h: usize,
    data: Vec<f64>,
}

impl PlaneF {
    fn from_channel(image: &ImagePlanar, ch: Channel) -> Self {
        Self {
            w: image.width() as usize,
            h: image.height() as usize,
            data: image.plane(ch).iter().map(|&s| s as f64).collect(),
        }
    }
}

/// The normalized 11-tap Gaussian used by both metrics.
fn gaussian_kernel() -> [f64; SSIM_WINDOW] {
    let mut k = [0.0; SSIM_WINDOW];
    let half = (SSIM_WINDOW / 2) as f64;
    let mut sum = 0.0;
    for (i, tap) in k.iter_mut().enumerate() {
        let d = i as f64 - half;
        *tap = math::exp(-(d * d) / (2.0 * SSIM_SIGMA * SSIM_SIGMA));
        sum += *tap;
    }
    for tap in &mut k {
        *tap /= sum;
    }
    k
}

/// Separable valid-mode convolution with a symmetric 1D kernel: the result
/// is (w−10) × (h−10). Summation order is fixed (kernel taps ascending), so
/// results are schedule-independent.
fn conv_valid(src: &PlaneF, kernel: &[f64; SSIM_WINDOW]) -> PlaneF {
    let kw = SSIM_WINDOW;
    let out_w = src.w - (kw - 1);
    let out_h = src.h - (kw - 1);
    // Horizontal pass: (out_w) × (src.h).
    let mut mid = vec![0.0; out_w * src.h];
    for y in 0..src.h {
        let row = &src.data[y * src.w..(y + 1) * src.w];
        for x in 0..out_w {
            let mut acc = 0.0;
            for (t, &k) in kernel.iter().enumerate() {
                acc += k * row[x + t];
            }
            mid[y * out_w + x] = acc;
        }
    }
    // Vertical pass: (out_w) × (out_h).
    let mut out = vec![0.0; out_w * out_h];
    for y in 0..out_h {
        for x in 0..out_w {
            let mut acc = 0.0;
            for (t, &k) in kernel.iter().enumerate() {
                acc += k * mid[(y + t) * out_w + x];
            }
            out[y * out_w + x] = acc;
        }
    }
    PlaneF {
        w: out_w,
        h: out_h,
        data: out,
    }
}

/// Mean SSIM and mean contrast-structure term of two planes.
fn ssim_plane(
    a: &PlaneF,
    b: &PlaneF,
    dynamic_range: f64,
    kernel: &[f64; SSIM_WINDOW],
) -> Result<(f64, f64), MetricsError> {
    debug_assert_eq!(a.w, b.w);
    debug_assert_eq!(a.h, b.h);
    if a.w < SSIM_WINDOW || a.h < SSIM_WINDOW {
        return Err(MetricsError::TooSmall {
            side: a.w.min(a.h) as u32,
            required: SSIM_WINDOW as u32,
        });
    }
    let c1 = (SSIM_K1 * dynamic_range) * (SSIM_K1 * dynamic_range);
    let c2 = (SSIM_K2 * dynamic_range) * (SSIM_K2 * dynamic_range);

    let sq = |p: &PlaneF| PlaneF {
        w: p.w,
        h: p.h,
        data: p.data.iter().map(|v| v * v).collect(),
    };
    let prod = PlaneF {
        w: a.w,
        h: a.h,
        data: a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect(),
    };

    let mu_a = conv_valid(a, kernel);
    let mu_b = conv_valid(b, kernel);
    let e_aa = conv_valid(&sq(a), kernel);
    let e_bb = conv_valid(&sq(b), kernel);
    let e_ab = conv_valid(&prod, kernel);

    let count = mu_a.data.len();
    let mut ssim_sum = 0.0;
    let mut cs_sum = 0.0;
    for i in 0..count {
        let ma = mu_a.data[i];
        let mb = mu_b.data[i];
        let va = e_aa.data[i] - ma * ma;
        let vb = e_bb.data[i] - mb * mb;
        let cov = e_ab.data[i] - ma * mb;
        let luminance = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
        let cs = (2.0 * cov + c2) / (va + vb + c2);
        ssim_sum += luminance * cs;
        cs_sum += cs;
    }
    Ok((ssim_sum / count as f64, cs_sum / count as f64))
}

/// 2×2 mean downsample, dropping any odd trailing row/column. The four
/// samples are summed in a fixed order (top-left, top-right, bottom-left,
/// bottom-right) before the single multiply.
fn downsample2(p: &PlaneF) -> PlaneF {
    let w = p.w / 2;
    let h = p.h / 2;
    let mut data = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let tl = p.data[(2 * y) * p.w + 2 * x];
            let tr = p.data[(2 * y) * p.w + 2 * x + 1];
            let bl = p.data[(2 * y + 1) * p.w + 2 * x];
            let br = p.data[(2 * y + 1) * p.w + 2 * x + 1];
            data[y * w + x] = ((tl + tr) + bl + br) * 0.25;
        }
    }
    PlaneF { w, h, data }
}

/// Single-scale SSIM, channels averaged with equal weight.
pub fn ssim(reference: &ImagePlanar, test: &ImagePlanar) -> Result<f64, MetricsError> {
    check_compatible(reference, test)?;
    let kernel = gaussian_kernel();
    let l = reference.max_value() as f64;
    let mut total = 0.0;
    for ch in Channel::ALL {
        let a = PlaneF::from_channel(reference, ch);
        let b = PlaneF::from_channel(test, ch);
        let (s, _) = ssim_plane(&a, &b, l, &kernel)?;
        total += s;
    }
    Ok(total / 3.0)
}

/// Five-scale MS-SSIM, channels averaged with equal weight. Requires both
/// image sides to be at least 176 so the coarsest scale still fits the
/// window.
pub fn ms_ssim(reference: &ImagePlanar, test: &ImagePlanar) -> Result<f64, MetricsError> {
    check_compatible(reference, test)?;
    let side = reference.width().min(reference.height());
    if side < MS_SSIM_MIN_SIDE {
        return Err(MetricsError::TooSmall {
            side,
            required: MS_SSIM_MIN_SIDE,
        });
    }
    let kernel = gaussian_kernel();
    let l = reference.max_value() as f64;
    let scales = MS_SSIM_WEIGHTS.len();
    let mut total = 0.0;
    for ch in Channel::ALL {
        let mut a = PlaneF::from_channel(reference, ch);
        let mut b = PlaneF::from_channel(test, ch);
        let mut score = 1.0;
        for (scale, &weight) in MS_SSIM_WEIGHTS.iter().enumerate() {
            let (s, cs) = ssim_plane(&a, &b, l, &kernel)?;
            if scale + 1 < scales {
                // Contrast-structure only; clamp to keep fractional powers
                // defined under heavy distortion.
                score *= math::powf(cs.max(0.0), weight);
                a = downsample2(&a);
                b = downsample2(&b);
            } else {
                // Luminance enters at the coarsest scale only.
                score *= math::powf(s.max(0.0), weight);
            }
        }
        total += score;
    }
    Ok(total / 3.0)
}

/// Per-channel and mean PSNR.
pub fn psnr(reference: &ImagePlanar, test: &ImagePlanar) -> Result<PsnrReport, MetricsError> {
    check_compatible(reference, test)?;
    let max = reference.max_value() as f64;
    let mut mses = [0.0f64; 3];
    for ch in Channel::ALL {
        let a = reference.plane(ch);
        let b = test.plane(ch);
        let mut sum = 0.0;
        for (&x, &y) in a.iter().zip(b) {
            let d = x as f64 - y as f64;
            sum += d * d;
        }
        mses[ch.index()] = sum / a.len() as f64;
    }
    let to_psnr = |mse: f64| {
        if mse == 0.0 {
            Psnr::Lossless
        } else {
            Psnr::Db(10.0 * math::log10(max * max / mse))
        }
    };
    let mean_mse = (mses[0] + mses[1] + mses[2]) / 3.0;
    Ok(PsnrReport {
        g: to_psnr(mses[Channel::G.index()]),
        b: to_psnr(mses[Channel::B.index()]),
        r: to_psnr(mses[Channel::R.index()]),
        mean: to_psnr(mean_mse),
    })
}
