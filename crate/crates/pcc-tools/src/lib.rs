//! Host-side companion to the core codec.
//!
//! Everything that needs an operating system lives here: PPM file I/O, the
//! bundled synthetic evaluation corpus, thread-pooled encoding, and the
//! CSV/JSON report generation behind the `pcc` command-line tool. The codec
//! itself (transform, quantization, perceptual control, bitstream) stays in
//! `pcc-core`.

pub mod corpus;
pub mod parallel;
pub mod ppm;
pub mod report;
pub mod synth;
