//! CIELAB conversion and color difference.
//!
//! Samples are treated as display-referred sRGB (IEC 61966-2-1 transfer
//! curve, D65). The reference white is taken as the row sums of the
//! RGB-to-XYZ matrix so that full-scale gray maps exactly to L = 100,
//! a = b = 0.

use crate::math;
use core::fmt;

/// CIELAB coordinate triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabColor {
    /// Lightness, 0 (black) to 100 (white).
    pub l: f64,
    /// Green-red chromatic axis.
    pub a: f64,
    /// Blue-yellow chromatic axis.
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorError {
    SampleOutOfRange { value: u16, max: u16 },
    UnsupportedBitDepth(u8),
    InvalidEpsilon,
}

impl fmt::Display for ColorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColorError::SampleOutOfRange { value, max } => {
                write!(f, "sample value {value} exceeds maximum {max}")
            }
            ColorError::UnsupportedBitDepth(d) => {
                write!(f, "unsupported bit depth {d} (expected 8 or 10)")
            }
            ColorError::InvalidEpsilon => write!(f, "band epsilon must lie in (0, 1)"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ColorError {}

// sRGB -> XYZ (D65, 2 degree observer).
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

const WHITE_X: f64 = RGB_TO_XYZ[0][0] + RGB_TO_XYZ[0][1] + RGB_TO_XYZ[0][2];
const WHITE_Y: f64 = RGB_TO_XYZ[1][0] + RGB_TO_XYZ[1][1] + RGB_TO_XYZ[1][2];
const WHITE_Z: f64 = RGB_TO_XYZ[2][0] + RGB_TO_XYZ[2][1] + RGB_TO_XYZ[2][2];

// CIE L* segment boundary (6/29)^3 and slope (29/3)^3.
const LAB_DELTA3: f64 = 216.0 / 24389.0;
const LAB_KAPPA: f64 = 24389.0 / 27.0;

fn srgb_expand(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        math::powf((v + 0.055) / 1.055, 2.4)
    }
}

fn lab_f(t: f64) -> f64 {
    if t > LAB_DELTA3 {
        math::cbrt(t)
    } else {
        (LAB_KAPPA * t + 16.0) / 116.0
    }
}

/// Convert one RGB sample triple to CIELAB.
pub fn rgb_to_lab(r: u16, g: u16, b: u16, bit_depth: u8) -> Result<LabColor, ColorError> {
    if bit_depth != 8 && bit_depth != 10 {
        return Err(ColorError::UnsupportedBitDepth(bit_depth));
    }
    let max = ((1u32 << bit_depth) - 1) as u16;
    for value in [r, g, b] {
        if value > max {
            return Err(ColorError::SampleOutOfRange { value, max });
        }
    }
    let scale = 1.0 / max as f64;
    let lin = [
        srgb_expand(r as f64 * scale),
        srgb_expand(g as f64 * scale),
        srgb_expand(b as f64 * scale),
    ];
    let x = RGB_TO_XYZ[0][0] * lin[0] + RGB_TO_XYZ[0][1] * lin[1] + RGB_TO_XYZ[0][2] * lin[2];
    let y = RGB_TO_XYZ[1][0] * lin[0] + RGB_TO_XYZ[1][1] * lin[1] + RGB_TO_XYZ[1][2] * lin[2];
    let z = RGB_TO_XYZ[2][0] * lin[0] + RGB_TO_XYZ[2][1] * lin[1] + RGB_TO_XYZ[2][2] * lin[2];
    let fx = lab_f(x / WHITE_X);
    let fy = lab_f(y / WHITE_Y);
    let fz = lab_f(z / WHITE_Z);
    Ok(LabColor {
        l: 116.0 * fy - 16.0,
        a: 500.0 * (fx - fy),
        b: 200.0 * (fy - fz),
    })
}

/// Euclidean CIELAB color difference.
pub fn delta_e_ab(c1: &LabColor, c2: &LabColor) -> f64 {
    let dl = c2.l - c1.l;
    let da = c2.a - c1.a;
    let db = c2.b - c1.b;
    math::sqrt(dl * dl + da * da + db * db)
}

/// The just-noticeable color difference threshold.
pub const JNCD_THRESHOLD: f64 = 2.3;

/// Acceptance band around the JNCD threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JncdBand {
    epsilon: f64,
}

impl JncdBand {
    pub const DEFAULT_EPSILON: f64 = 0.1;

    /// Band of half-width `epsilon` around the threshold; epsilon must lie
    /// strictly inside (0, 1).
    pub fn new(epsilon: f64) -> Result<Self, ColorError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(ColorError::InvalidEpsilon);
        }
        Ok(Self { epsilon })
    }

    pub fn threshold(&self) -> f64 {
        JNCD_THRESHOLD
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn lower(&self) -> f64 {
        JNCD_THRESHOLD - self.epsilon
    }

    pub fn upper(&self) -> f64 {
        JNCD_THRESHOLD + self.epsilon
    }
}

impl Default for JncdBand {
    fn default() -> Self {
        Self {
            epsilon: Self::DEFAULT_EPSILON,
        }
    }
}

/// Position of a color difference relative to the acceptance band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandClass {
    Below,
    Within,
    Above,
}

/// Classify a color difference against the band (inclusive at both edges).
pub fn classify_jncd(delta_e: f64, band: &JncdBand) -> BandClass {
    if delta_e < band.lower() {
        BandClass::Below
    } else if delta_e <= band.upper() {
        BandClass::Within
    } else {
        BandClass::Above
    }
}
