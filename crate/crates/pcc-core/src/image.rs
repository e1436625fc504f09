//! Planar RGB 4:4:4 rasters and square sample blocks.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Color channel, ordered by perceptual importance (G first, R last is the
/// file-layout tail; B and R are the coarsening targets).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    G = 0,
    B = 1,
    R = 2,
}

impl Channel {
    /// All channels in internal plane order.
    pub const ALL: [Channel; 3] = [Channel::G, Channel::B, Channel::R];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImageError {
    /// Width or height is zero.
    EmptyDimensions,
    /// Bit depth other than 8 or 10.
    UnsupportedBitDepth(u8),
    /// A plane's length does not match width*height.
    PlaneSizeMismatch { expected: usize, got: usize },
    /// A sample exceeds the bit-depth range.
    SampleOutOfRange { value: u16, max: u16 },
}

impl fmt::Display for ImageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImageError::EmptyDimensions => write!(f, "image dimensions must be positive"),
            ImageError::UnsupportedBitDepth(d) => write!(f, "unsupported bit depth {d} (expected 8 or 10)"),
            ImageError::PlaneSizeMismatch { expected, got } => {
                write!(f, "plane has {got} samples, expected {expected}")
            }
            ImageError::SampleOutOfRange { value, max } => {
                write!(f, "sample value {value} exceeds maximum {max}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ImageError {}

/// Planar RGB 4:4:4 raster. Planes are stored in G, B, R order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImagePlanar {
    width: u32,
    height: u32,
    bit_depth: u8,
    planes: [Vec<u16>; 3],
}

impl ImagePlanar {
    /// All-zero image.
    pub fn new(width: u32, height: u32, bit_depth: u8) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyDimensions);
        }
        if bit_depth != 8 && bit_depth != 10 {
            return Err(ImageError::UnsupportedBitDepth(bit_depth));
        }
        let plane = vec![0u16; width as usize * height as usize];
        Ok(Self {
            width,
            height,
            bit_depth,
            planes: [plane.clone(), plane.clone(), plane],
        })
    }

    /// Build from G, B, R planes, validating dimensions and sample range.
    pub fn from_planes(
        width: u32,
        height: u32,
        bit_depth: u8,
        planes: [Vec<u16>; 3],
    ) -> Result<Self, ImageError> {
        let mut img = Self::new(width, height, bit_depth)?;
        let max = img.max_value();
        let expected = width as usize * height as usize;
        for plane in &planes {
            if plane.len() != expected {
                return Err(ImageError::PlaneSizeMismatch {
                    expected,
                    got: plane.len(),
                });
            }
            if let Some(&value) = plane.iter().find(|&&v| v > max) {
                return Err(ImageError::SampleOutOfRange { value, max });
            }
        }
        img.planes = planes;
        Ok(img)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    /// Largest representable sample value.
    pub fn max_value(&self) -> u16 {
        ((1u32 << self.bit_depth) - 1) as u16
    }

    pub fn plane(&self, channel: Channel) -> &[u16] {
        &self.planes[channel.index()]
    }

    pub fn sample(&self, channel: Channel, x: u32, y: u32) -> u16 {
        self.planes[channel.index()][y as usize * self.width as usize + x as usize]
    }

    /// Extract a `size`x`size` block at (x0, y0), replicating edge samples
    /// where the block extends past the raster.
    pub fn extract_block(&self, channel: Channel, x0: u32, y0: u32, size: usize) -> SampleBlock {
        let plane = self.plane(channel);
        let (w, h) = (self.width as usize, self.height as usize);
        let (x0, y0) = (x0 as usize, y0 as usize);
        let mut samples = Vec::with_capacity(size * size);
        for dy in 0..size {
            let y = (y0 + dy).min(h - 1);
            let row = &plane[y * w..(y + 1) * w];
            for dx in 0..size {
                let x = (x0 + dx).min(w - 1);
                samples.push(row[x]);
            }
        }
        SampleBlock { size, samples }
    }

    /// Copy a block into the raster at (x0, y0), cropping where the block
    /// extends past the raster.
    pub fn write_block(&mut self, channel: Channel, x0: u32, y0: u32, block: &SampleBlock) {
        let width = self.width as usize;
        let height = self.height as usize;
        let (x0, y0) = (x0 as usize, y0 as usize);
        let plane = &mut self.planes[channel.index()];
        for dy in 0..block.size {
            let y = y0 + dy;
            if y >= height {
                break;
            }
            for dx in 0..block.size {
                let x = x0 + dx;
                if x >= width {
                    break;
                }
                plane[y * width + x] = block.samples[dy * block.size + dx];
            }
        }
    }
}

/// Square block of samples from a single channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleBlock {
    size: usize,
    samples: Vec<u16>,
}

impl SampleBlock {
    pub fn new(size: usize, samples: Vec<u16>) -> Self {
        assert_eq!(samples.len(), size * size, "block sample count");
        Self { size, samples }
    }

    pub fn constant(size: usize, value: u16) -> Self {
        Self {
            size,
            samples: vec![value; size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn samples(&self) -> &[u16] {
        &self.samples
    }

    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.samples[y * self.size + x]
    }
}
