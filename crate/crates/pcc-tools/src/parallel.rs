//! Thread-pooled encoding.
//!
//! Coding units are independent at encode time (each reads only the shared
//! input image), so they can be processed on any number of worker threads.
//! Results are collected in raster order and handed to the encoder's single
//! `assemble` step — the same funnel the sequential path uses — which is why
//! the output bytes cannot depend on the thread count.

use pcc_core::{CodecError, EncodeResult, Encoder, ImagePlanar};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParallelError {
    #[error("{0}")]
    Codec(#[from] CodecError),
    #[error("could not build a {threads}-thread pool: {reason}")]
    Pool { threads: usize, reason: String },
}

/// Encode with an explicit worker count (0 means rayon's default, which is
/// the machine's available parallelism).
pub fn encode_parallel(
    encoder: &Encoder,
    image: &ImagePlanar,
    threads: usize,
) -> Result<EncodeResult, ParallelError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ParallelError::Pool {
            threads,
            reason: e.to_string(),
        })?;
    let parts = pool.install(|| {
        (0..encoder.cu_count(image))
            .into_par_iter()
            .map(|index| encoder.encode_cu(image, index))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(encoder.assemble(image, parts)?)
}
