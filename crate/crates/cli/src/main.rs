//! `sfista`: generate, blur, decompose, restore and benchmark.

mod commands;
mod outputs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sfista_core::Error;

#[derive(Parser)]
#[command(name = "sfista", version, about = "Structured Tikhonov image deblurring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Blur an image with a PSF and optionally add noise.
    Blur(BlurArgs),
    /// Write the singular values and truncation errors of a PSF's Kronecker decomposition.
    Decompose(DecomposeArgs),
    /// Restore a blurred image with FISTA (exact operator) or sFISTA (s terms).
    Restore(RestoreArgs),
    /// Run a suite of benchmark cases and write CSV rows.
    #[command(long_about = BENCH_HELP)]
    Bench(BenchArgs),
    /// Write a PSF in matrix format.
    GenPsf(GenPsfArgs),
    /// Write a synthetic test image.
    GenImage(GenImageArgs),
}

const BENCH_HELP: &str = "\
Run a suite of benchmark cases and write CSV rows.

The suite file holds one case per line as whitespace-separated key=value pairs;
`#` starts a comment. Required keys: image, blur, level. Optional keys with
defaults: id=case<line>, size=64, bc=reflective, noise=gauss, noise_level=0.01,
s=5 (comma list, `full` allowed), iters=50, seeds=1 (comma list), lambda=auto.

Every case runs FISTA on the exact operator and sFISTA for each s, sharing L and
lambda. Rows: case,seed,method,s,iters,lambda,eta,gamma,ms,setup_ms,tratio.
`ms` is the solver loop alone; `setup_ms` is the decomposition and operator
build; tratio is the per-iteration time of sFISTA over FISTA.

Blur levels on a 64x64 image (scaled linearly with image size):
  defocus radius   mild 2, medium 4, severe 8 pixels
  shake steps      mild 10, medium 30, severe 80
Shake PSFs are 2*ceil(2*sqrt(steps))+1 pixels wide, capped to the image.";

#[derive(Args)]
struct BlurArgs {
    #[arg(long)]
    image: PathBuf,
    #[arg(long)]
    psf: PathBuf,
    #[arg(long, default_value = "reflective")]
    bc: String,
    /// gauss, laplace, multiplicative or none
    #[arg(long, default_value = "none")]
    noise: String,
    /// ||noise|| / ||blurred image||
    #[arg(long, default_value_t = 0.0)]
    noise_level: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output image; `.pgm` is quantized, anything else is a matrix file.
    /// A sidecar `<out>.meta` records the parameters.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    psf: PathBuf,
    #[arg(long, default_value = "reflective")]
    bc: String,
    /// Term count whose truncation error is reported in the header.
    #[arg(short = 's', default_value = "1")]
    s: String,
    /// Image size the PSF is padded to (defaults to the PSF size).
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args)]
struct RestoreArgs {
    #[arg(long)]
    blurred: PathBuf,
    #[arg(long)]
    psf: PathBuf,
    /// Defaults to the value in the blurred image's sidecar, else reflective.
    #[arg(long)]
    bc: Option<String>,
    /// fista (exact operator) or sfista (s-term operator)
    #[arg(long, default_value = "sfista")]
    method: String,
    /// Number of Kronecker terms for sfista, or `full`.
    #[arg(short = 's', default_value = "5")]
    s: String,
    /// A positive number, or `auto` for the discrepancy principle.
    #[arg(long, default_value = "auto")]
    lambda: String,
    /// Noise level for `--lambda auto`; read from the sidecar when omitted.
    #[arg(long)]
    noise_level: Option<f64>,
    #[arg(long, default_value_t = 50)]
    iters: usize,
    /// Step constant L; estimated by power iteration on the exact operator when omitted.
    #[arg(long)]
    lipschitz: Option<f64>,
    /// Relative-change stopping tolerance (0 runs all iterations).
    #[arg(long, default_value_t = 0.0)]
    tol: f64,
    /// Ground truth image; enables eta in the metrics.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Per-iteration history CSV.
    #[arg(long)]
    metrics_csv: Option<PathBuf>,
    /// Evaluate Kronecker terms concurrently.
    #[arg(long)]
    parallel: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    suite: PathBuf,
    /// Receives bench.csv plus one <case>.csv per case.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct GenPsfArgs {
    /// delta, gaussian, disk or shake; ignored when --level is given
    #[arg(long, default_value = "gaussian")]
    kind: String,
    /// PSF width (odd)
    #[arg(long, default_value_t = 9)]
    size: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 2.0)]
    radius: f64,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Blur level (mild, medium, severe) for --blur on an --image-size image.
    #[arg(long, requires = "image_size")]
    level: Option<String>,
    /// defocus or shake, used with --level
    #[arg(long, default_value = "defocus")]
    blur: String,
    #[arg(long)]
    image_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenImageArgs {
    /// pattern1, pattern2, ppower, smooth, dot2, dotk or delta
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 64)]
    rows: usize,
    #[arg(long, default_value_t = 64)]
    cols: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) | Error::Capacity(_) | Error::Io(_) => 2,
        Error::Format { .. } => 3,
        Error::Numeric(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Blur(a) => commands::blur(a),
        Command::Decompose(a) => commands::decompose(a),
        Command::Restore(a) => commands::restore(a),
        Command::Bench(a) => commands::bench(a),
        Command::GenPsf(a) => commands::gen_psf(a),
        Command::GenImage(a) => commands::gen_image(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(exit_code(&e))
        }
    }
}
