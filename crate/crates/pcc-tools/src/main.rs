//! `pcc` — perceptual color image codec command line.
//!
//! Subcommands: `encode`, `decode`, `metrics`, `report`, `corpus`. Every
//! command prints one machine-readable JSON line to stdout and a short
//! human summary to stderr. Exit codes: 0 success, 1 I/O, 2 usage,
//! 3 bitstream parse error.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pcc_core::control::ControlConfig;
use pcc_core::metrics::{bpp, ms_ssim, psnr, ssim, MetricsError, PsnrReport};
use pcc_core::{decode_bytes, CodecError, CodecMode, Encoder, EncoderConfig, ImagePlanar, JncdBand};
use pcc_tools::corpus::desk_corpus;
use pcc_tools::parallel::encode_parallel;
use pcc_tools::ppm;
use pcc_tools::report::corpus_report;

#[derive(Parser)]
#[command(
    name = "pcc",
    version,
    about = "Perceptual color image codec: JNCD-driven per-channel quantization",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a PPM image into a .pcc bitstream.
    Encode(EncodeArgs),
    /// Decode a .pcc bitstream back into a PPM image.
    Decode(DecodeArgs),
    /// Compare a test image against a reference (SSIM, MS-SSIM, PSNR).
    Metrics(MetricsArgs),
    /// Evaluate every PPM in a directory at one or more QPs, both modes.
    Report(ReportArgs),
    /// Write the bundled synthetic evaluation corpus as PPM files.
    Corpus(CorpusArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Perceptual per-CU QP adjustment.
    Pcc,
    /// Flat quantization at the frame QP.
    Uniform,
}

impl From<ModeArg> for CodecMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Pcc => CodecMode::Pcc,
            ModeArg::Uniform => CodecMode::Uniform,
        }
    }
}

fn mode_name(mode: CodecMode) -> &'static str {
    match mode {
        CodecMode::Pcc => "pcc",
        CodecMode::Uniform => "uniform",
    }
}

#[derive(Args)]
struct EncodeArgs {
    /// Input image (binary PPM, maxval 255 or 65535).
    #[arg(long)]
    input: PathBuf,
    /// Output bitstream path.
    #[arg(long)]
    output: PathBuf,
    /// Frame-level initial QP.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=51))]
    qp: u8,
    /// Coding mode.
    #[arg(long, value_enum, default_value_t = ModeArg::Pcc)]
    mode: ModeArg,
    /// Coding-unit edge length.
    #[arg(long, default_value_t = 16, value_parser = parse_cu_size)]
    cu_size: u8,
    /// Half-width of the JNCD acceptance band (0 < epsilon < 1).
    #[arg(long, default_value_t = JncdBand::DEFAULT_EPSILON, value_parser = parse_epsilon)]
    epsilon: f64,
    /// Maximum schedule passes of the perceptual search.
    #[arg(long, default_value_t = ControlConfig::DEFAULT_MAX_PASSES)]
    max_passes: u32,
    /// Worker threads (default: hardware count; PCC_THREADS overrides).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct DecodeArgs {
    /// Input bitstream path.
    #[arg(long)]
    input: PathBuf,
    /// Output image path (binary PPM).
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct MetricsArgs {
    /// Reference image (binary PPM).
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Test image (binary PPM).
    #[arg(long)]
    test: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory of .ppm images to evaluate (lexicographic file order).
    #[arg(long)]
    corpus: PathBuf,
    /// QP values, comma separated (e.g. 22 or 22,30,40).
    #[arg(long, value_delimiter = ',', required = true,
          value_parser = clap::value_parser!(u8).range(0..=51))]
    qp: Vec<u8>,
    /// CSV output path.
    #[arg(long)]
    output: PathBuf,
    /// Worker threads (default: hardware count; PCC_THREADS overrides).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct CorpusArgs {
    /// Directory to write the corpus PPMs into (created if missing).
    #[arg(long)]
    output: PathBuf,
}

fn parse_cu_size(s: &str) -> Result<u8, String> {
    let v: u8 = s.parse().map_err(|_| "not an integer".to_string())?;
    if [8, 16, 32, 64].contains(&v) {
        Ok(v)
    } else {
        Err("must be 8, 16, 32 or 64".to_string())
    }
}

fn parse_epsilon(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| "not a number".to_string())?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err("must satisfy 0 < epsilon < 1".to_string())
    }
}

// ----------------------------------------------------------------------------
// Errors and exit codes
// ----------------------------------------------------------------------------

enum AppError {
    /// Exit 1: missing, unreadable, unwritable or malformed files.
    Io(String),
    /// Exit 2: flags or inputs that make the request itself invalid.
    Usage(String),
    /// Exit 3: a .pcc stream that does not parse; message names the byte.
    Parse(String),
}

impl AppError {
    fn code(&self) -> u8 {
        match self {
            AppError::Io(_) => 1,
            AppError::Usage(_) => 2,
            AppError::Parse(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Io(m) | AppError::Usage(m) | AppError::Parse(m) => m,
        }
    }
}

impl From<ppm::PpmError> for AppError {
    fn from(e: ppm::PpmError) -> Self {
        AppError::Io(e.to_string())
    }
}

fn io_error(context: &Path, e: io::Error) -> AppError {
    AppError::Io(format!("{}: {e}", context.display()))
}

/// PCC_THREADS (when set) overrides --threads; absent both, 0 lets the pool
/// use the hardware count.
fn resolve_threads(flag: Option<usize>) -> Result<usize, AppError> {
    match std::env::var("PCC_THREADS") {
        Ok(value) => value.parse().map_err(|_| {
            AppError::Usage(format!("PCC_THREADS must be a thread count, got {value:?}"))
        }),
        Err(_) => Ok(flag.unwrap_or(0)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(), AppError> {
    match command {
        Command::Encode(args) => cmd_encode(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Report(args) => cmd_report(args),
        Command::Corpus(args) => cmd_corpus(args),
    }
}

fn cmd_encode(args: EncodeArgs) -> Result<(), AppError> {
    let threads = resolve_threads(args.threads)?;
    let image = ppm::read_ppm(&args.input)?;
    let band = JncdBand::new(args.epsilon)
        .map_err(|e| AppError::Usage(format!("--epsilon {}: {e}", args.epsilon)))?;
    let cfg = EncoderConfig {
        iqp: args.qp,
        cu_size: args.cu_size,
        mode: args.mode.into(),
        control: ControlConfig {
            band,
            max_passes: args.max_passes,
        },
    };
    let encoder = Encoder::new(cfg).map_err(|e| AppError::Usage(e.to_string()))?;
    let result = encode_parallel(&encoder, &image, threads)
        .map_err(|e| AppError::Io(format!("encoding failed: {e}")))?;
    fs::write(&args.output, &result.bytes).map_err(|e| io_error(&args.output, e))?;

    let bpp_v = bpp(&result.bytes, &image).expect("bytes were just assembled for this image");
    let (off_g, off_b, off_r) = result.stats.mean_offsets();
    println!(
        "{}",
        json!({
            "command": "encode",
            "input": args.input.display().to_string(),
            "output": args.output.display().to_string(),
            "width": image.width(),
            "height": image.height(),
            "bit_depth": image.bit_depth(),
            "mode": mode_name(cfg.mode),
            "iqp": args.qp,
            "cu_size": args.cu_size,
            "bytes": result.bytes.len(),
            "bpp": bpp_v,
            "mean_off_g": off_g,
            "mean_off_b": off_b,
            "mean_off_r": off_r,
            "band_hit_rate": result.stats.band_hit_rate(),
            "evaluations": result.stats.total_evaluations(),
        })
    );
    eprintln!(
        "encoded {}x{} -> {} bytes ({:.4} bpp), {} mode, iqp {}",
        image.width(),
        image.height(),
        result.bytes.len(),
        bpp_v,
        mode_name(cfg.mode),
        args.qp
    );
    Ok(())
}

fn cmd_decode(args: DecodeArgs) -> Result<(), AppError> {
    let bytes = fs::read(&args.input).map_err(|e| io_error(&args.input, e))?;
    let (stream, image) = decode_bytes(&bytes).map_err(|e| match e {
        CodecError::Stream(s) => AppError::Parse(format!("{}: {s}", args.input.display())),
        other => AppError::Io(format!("{}: {other}", args.input.display())),
    })?;
    ppm::write_ppm(&image, &args.output)?;

    println!(
        "{}",
        json!({
            "command": "decode",
            "input": args.input.display().to_string(),
            "output": args.output.display().to_string(),
            "width": stream.header.width,
            "height": stream.header.height,
            "bit_depth": stream.header.bit_depth,
            "mode": mode_name(stream.header.mode),
            "iqp": stream.header.iqp,
            "cu_size": stream.header.cu_size,
            "cus": stream.cus.len(),
        })
    );
    eprintln!(
        "decoded {}x{} ({} mode, iqp {}) -> {}",
        stream.header.width,
        stream.header.height,
        mode_name(stream.header.mode),
        stream.header.iqp,
        args.output.display()
    );
    Ok(())
}

fn cmd_metrics(args: MetricsArgs) -> Result<(), AppError> {
    let reference = ppm::read_ppm(&args.reference)?;
    let test = ppm::read_ppm(&args.test)?;

    let to_usage = |e: MetricsError| AppError::Usage(e.to_string());
    let ssim_v = ssim(&reference, &test).map_err(to_usage)?;
    let ms_ssim_v = match ms_ssim(&reference, &test) {
        Ok(v) => Some(v),
        Err(MetricsError::TooSmall { .. }) => None,
        Err(e) => return Err(to_usage(e)),
    };
    let psnr_v: PsnrReport = psnr(&reference, &test).map_err(to_usage)?;
    let db = |p: pcc_core::Psnr| {
        let v = p.db();
        v.is_finite().then_some(v)
    };

    println!(
        "{}",
        json!({
            "command": "metrics",
            "ref": args.reference.display().to_string(),
            "test": args.test.display().to_string(),
            "ssim": ssim_v,
            "ms_ssim": ms_ssim_v,
            "psnr_g": db(psnr_v.g),
            "psnr_b": db(psnr_v.b),
            "psnr_r": db(psnr_v.r),
            "psnr_mean": db(psnr_v.mean),
        })
    );
    let fmt_db = |p: pcc_core::Psnr| match db(p) {
        Some(v) => format!("{v:.4} dB"),
        None => "lossless".to_string(),
    };
    eprintln!(
        "ssim {:.6}, ms-ssim {}, psnr {}",
        ssim_v,
        ms_ssim_v.map_or_else(|| "n/a (image too small)".into(), |v| format!("{v:.6}")),
        fmt_db(psnr_v.mean)
    );
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), AppError> {
    let threads = resolve_threads(args.threads)?;
    let mut paths: Vec<PathBuf> = fs::read_dir(&args.corpus)
        .map_err(|e| io_error(&args.corpus, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "ppm"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(AppError::Io(format!(
            "no .ppm files in {}",
            args.corpus.display()
        )));
    }

    let mut images: Vec<(String, ImagePlanar)> = Vec::with_capacity(paths.len());
    for path in &paths {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        images.push((name, ppm::read_ppm(path)?));
    }

    let report = corpus_report(&images, &args.qp, threads)
        .map_err(|e| AppError::Io(format!("evaluation failed: {e}")))?;
    fs::write(&args.output, report.to_csv()).map_err(|e| io_error(&args.output, e))?;

    let exceptions = report.exceptions();
    println!(
        "{}",
        json!({
            "command": "report",
            "corpus": args.corpus.display().to_string(),
            "output": args.output.display().to_string(),
            "images": images.len(),
            "iqp": args.qp,
            "rows": report.rows.len(),
            "exceptions": exceptions,
        })
    );
    let mut summary = format!(
        "evaluated {} images x {} QPs x 2 modes = {} rows -> {}",
        images.len(),
        args.qp.len(),
        report.rows.len(),
        args.output.display()
    );
    for e in &exceptions {
        let _ = write!(summary, "\nexception: {e}");
    }
    eprintln!("{summary}");
    Ok(())
}

fn cmd_corpus(args: CorpusArgs) -> Result<(), AppError> {
    fs::create_dir_all(&args.output).map_err(|e| io_error(&args.output, e))?;
    let corpus = desk_corpus();
    for entry in &corpus {
        let path = args.output.join(format!("{}.ppm", entry.name));
        ppm::write_ppm(&entry.image, &path)?;
    }
    println!(
        "{}",
        json!({
            "command": "corpus",
            "output": args.output.display().to_string(),
            "images": corpus.len(),
        })
    );
    eprintln!(
        "wrote {} corpus images to {}",
        corpus.len(),
        args.output.display()
    );
    Ok(())
}
