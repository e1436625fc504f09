//! Corpus evaluation: rate and quality of both modes at matched QPs,
//! emitted as fixed-column CSV plus a flagged-exception list.

use pcc_core::metrics::{bpp, ms_ssim, psnr, ssim, MetricsError};
use pcc_core::{CodecMode, Encoder, EncoderConfig, ImagePlanar};
use serde::Serialize;
use thiserror::Error;

use crate::parallel::{encode_parallel, ParallelError};

/// The fixed CSV column set, in order.
pub const CSV_HEADER: &str =
    "name,mode,iqp,bpp,ssim,ms_ssim,psnr,mean_off_g,mean_off_b,mean_off_r,band_hit_rate";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{0}")]
    Encode(#[from] ParallelError),
    #[error("{0}")]
    Metrics(#[from] MetricsError),
    #[error("encoder configuration: {0}")]
    Config(#[from] pcc_core::CodecError),
}

/// One evaluated (image, mode, iqp) cell.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub name: String,
    pub mode: &'static str,
    pub iqp: u8,
    pub bpp: f64,
    pub ssim: f64,
    /// None when the image is too small for the 5-scale pyramid.
    pub ms_ssim: Option<f64>,
    /// None encodes lossless (infinite PSNR).
    pub psnr_db: Option<f64>,
    pub mean_off_g: f64,
    pub mean_off_b: f64,
    pub mean_off_r: f64,
    pub band_hit_rate: f64,
}

impl ReportRow {
    fn csv_line(&self) -> String {
        let ms = self
            .ms_ssim
            .map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"));
        let psnr = self
            .psnr_db
            .map_or_else(|| "inf".to_string(), |v| format!("{v:.4}"));
        format!(
            "{},{},{},{:.6},{:.6},{},{},{:.4},{:.4},{:.4},{:.4}",
            self.name,
            self.mode,
            self.iqp,
            self.bpp,
            self.ssim,
            ms,
            psnr,
            self.mean_off_g,
            self.mean_off_b,
            self.mean_off_r,
            self.band_hit_rate
        )
    }
}

/// A full evaluation run.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
        out
    }

    /// Images where perceptual mode did NOT produce a strictly smaller
    /// stream than uniform mode at the same iqp. Flat content is the usual
    /// cause: per-CU offset signalling outweighs the coefficient savings.
    pub fn exceptions(&self) -> Vec<String> {
        let mut flagged = Vec::new();
        for pair in self.rows.chunks(2) {
            if let [uniform, pcc] = pair {
                debug_assert_eq!(uniform.name, pcc.name);
                debug_assert_eq!(uniform.iqp, pcc.iqp);
                if pcc.bpp >= uniform.bpp {
                    flagged.push(format!(
                        "{} at iqp {}: pcc {:.6} bpp >= uniform {:.6} bpp",
                        pcc.name, pcc.iqp, pcc.bpp, uniform.bpp
                    ));
                }
            }
        }
        flagged
    }
}

/// Evaluate one image in one mode at one iqp.
pub fn evaluate(
    name: &str,
    image: &ImagePlanar,
    mode: CodecMode,
    iqp: u8,
    threads: usize,
) -> Result<ReportRow, ReportError> {
    let cfg = match mode {
        CodecMode::Uniform => EncoderConfig::uniform(iqp),
        CodecMode::Pcc => EncoderConfig::pcc(iqp),
    };
    let encoder = Encoder::new(cfg)?;
    let result = encode_parallel(&encoder, image, threads)?;

    let ssim_v = ssim(image, &result.reconstruction)?;
    let ms_ssim_v = match ms_ssim(image, &result.reconstruction) {
        Ok(v) => Some(v),
        Err(MetricsError::TooSmall { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let psnr_db = psnr(image, &result.reconstruction)?.mean.db();
    let (mean_off_g, mean_off_b, mean_off_r) = result.stats.mean_offsets();

    Ok(ReportRow {
        name: name.to_string(),
        mode: match mode {
            CodecMode::Uniform => "uniform",
            CodecMode::Pcc => "pcc",
        },
        iqp,
        bpp: bpp(&result.bytes, image)?,
        ssim: ssim_v,
        ms_ssim: ms_ssim_v,
        psnr_db: psnr_db.is_finite().then_some(psnr_db),
        mean_off_g,
        mean_off_b,
        mean_off_r,
        band_hit_rate: result.stats.band_hit_rate(),
    })
}

/// Evaluate a corpus: for each image (input order) and each iqp (given
/// order), a uniform row then a pcc row. Row order is stable for diffing.
pub fn corpus_report(
    images: &[(String, ImagePlanar)],
    iqps: &[u8],
    threads: usize,
) -> Result<Report, ReportError> {
    let mut rows = Vec::with_capacity(images.len() * iqps.len() * 2);
    for (name, image) in images {
        for &iqp in iqps {
            rows.push(evaluate(name, image, CodecMode::Uniform, iqp, threads)?);
            rows.push(evaluate(name, image, CodecMode::Pcc, iqp, threads)?);
        }
    }
    Ok(Report { rows })
}
