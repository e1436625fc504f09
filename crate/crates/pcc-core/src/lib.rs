//! Perceptual color compression for RGB 4:4:4 still images.
//!
//! The encoder transform-codes each coding unit (CU) with a per-channel
//! deadzone quantizer and, in perceptual mode, searches per-channel
//! quantization parameters until the CIELAB color difference between the
//! raw and reconstructed CU means sits at the just-noticeable color
//! difference threshold. Blue and red coding blocks are coarsened ahead of
//! green, following the eye's spectral sensitivity ordering.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable the default
//! `std` feature and enable `libm` for the float math.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("pcc-core requires either the `std` or the `libm` feature");

mod math;

pub mod bits;
pub mod codec;
pub mod color;
pub mod container;
pub mod control;
pub mod dct;
pub mod image;
pub mod metrics;
pub mod quant;

pub use codec::{
    decode_bytes, decode_image, CodecError, CodecMode, EncodeResult, EncodeStats, EncodedCu,
    Encoder, EncoderConfig,
};
pub use color::{
    classify_jncd, delta_e_ab, rgb_to_lab, BandClass, JncdBand, LabColor, JNCD_THRESHOLD,
};
pub use container::{read_stream, write_stream, PccBitstream, StreamError, StreamHeader};
pub use control::{
    cu_delta_e, cu_means, pcc_adjust, pcc_adjust_observed, ControlConfig, CuOutcome, CuView,
    MeanTriple,
};
pub use image::{Channel, ImageError, ImagePlanar, SampleBlock};
pub use metrics::{bpp, ms_ssim, psnr, ssim, MetricsError, Psnr, PsnrReport};
pub use quant::QpState;
