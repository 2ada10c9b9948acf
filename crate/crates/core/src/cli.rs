//! `edgeforge` command line: `detect`, `bench`, `criteria`, `speedup-model`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{BenchOptions, PipelineTarget, DEFAULT_REPETITIONS, DEFAULT_WORKER_CAP};
use crate::criteria::{
    asymmetric_speedup, localization_criterion, minimal_response_criterion, snr_criterion,
    EdgeModel, Filter1D, LocalizationDensity, PerfModel, SpeedupModel,
};
use crate::error::{Error, Result};
use crate::filter::DEFAULT_SIGMA;
use crate::hysteresis::Thresholds;
use crate::image::{read_pgm_file, write_pgm_file, GrayImage};
use crate::parallel::{available_workers, WorkerConfig, DEFAULT_BAND_GRANULARITY};
use crate::pipeline::{run_pipeline, HysteresisMode, Operator, PipelineConfig, ThresholdMode};

/// Environment variable supplying the default for `--workers`.
pub const WORKERS_ENV: &str = "EDGEFORGE_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "edgeforge",
    version,
    about = "Deterministic parallel Canny edge detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the edge detector on a PGM image and write the edge map.
    Detect(DetectArgs),
    /// Time every stage across worker counts and write a report.
    Bench(BenchArgs),
    /// Evaluate detection, localization and minimal-response criteria.
    Criteria(CriteriaArgs),
    /// Evaluate the asymmetric multicore speedup model.
    SpeedupModel(SpeedupArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum HysteresisArg {
    Serial,
    Parallel,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OperatorArg {
    Canny,
    Laplacian,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    /// Gaussian standard deviation in pixels.
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    sigma: f64,
    /// Minimum rows per parallel task.
    #[arg(long, default_value_t = DEFAULT_BAND_GRANULARITY)]
    granularity: usize,
    /// Absolute low threshold (requires --high).
    #[arg(long, requires = "high", conflicts_with = "auto_threshold")]
    low: Option<f64>,
    /// Absolute high threshold (requires --low).
    #[arg(long, requires = "low", conflicts_with = "auto_threshold")]
    high: Option<f64>,
    /// Thresholds from the strongest edge (high = 0.2·max, low = 0.4·high). Default.
    #[arg(long)]
    auto_threshold: bool,
    #[arg(long, value_enum, default_value = "serial")]
    hysteresis: HysteresisArg,
    #[arg(long, value_enum, default_value = "canny")]
    operator: OperatorArg,
}

impl PipelineArgs {
    fn config(&self, workers: usize) -> Result<PipelineConfig> {
        let thresholds = match (self.low, self.high) {
            (Some(low), Some(high)) => ThresholdMode::Absolute(Thresholds::new(low, high)?),
            _ => ThresholdMode::Auto,
        };
        Ok(PipelineConfig {
            sigma: self.sigma,
            thresholds,
            workers: WorkerConfig::new(workers, self.granularity)?,
            hysteresis: match self.hysteresis {
                HysteresisArg::Serial => HysteresisMode::Serial,
                HysteresisArg::Parallel => HysteresisMode::Parallel,
            },
            operator: match self.operator {
                OperatorArg::Canny => Operator::Canny,
                OperatorArg::Laplacian => Operator::Laplacian,
            },
        })
    }
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[arg(long = "in", value_name = "PGM")]
    input: PathBuf,
    #[arg(long = "out", value_name = "PGM")]
    output: PathBuf,
    /// Worker threads [default: logical CPU count].
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Also write blurred, gradient-magnitude and thinned images into DIR.
    #[arg(long, value_name = "DIR")]
    dump_stages: Option<PathBuf>,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Input image; omit to benchmark seeded noise (see --noise).
    #[arg(long = "in", value_name = "PGM", conflicts_with = "noise")]
    input: Option<PathBuf>,
    /// Size of the generated noise image, WIDTHxHEIGHT.
    #[arg(long, value_name = "WxH", default_value = "1024x1024")]
    noise: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Comma-separated worker counts; must include 1.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 4])]
    workers_list: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    reps: usize,
    #[arg(long, default_value_t = DEFAULT_WORKER_CAP)]
    worker_cap: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Report path; stdout when omitted.
    #[arg(long = "out", value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Debug, Args)]
struct CriteriaArgs {
    /// Filter sample file: support T followed by an odd number of samples.
    #[arg(long, value_name = "FILE")]
    filter: PathBuf,
    /// Optional displacement density file, same layout, normalized on load.
    #[arg(long, value_name = "FILE")]
    density: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    #[arg(long, default_value_t = 1.0)]
    noise_sigma: f64,
}

#[derive(Debug, Args)]
struct SpeedupArgs {
    /// Parallel fraction in [0, 1].
    #[arg(long)]
    f: f64,
    /// Base-core-equivalent resources.
    #[arg(long)]
    n: u32,
    /// Resources fused into the fast core; prints a table over r when omitted.
    #[arg(long)]
    r: Option<u32>,
    /// Exponent alpha of perf(r) = r^alpha [default: 0.5, i.e. sqrt].
    #[arg(long)]
    perf_exponent: Option<f64>,
}

/// Runs the CLI with process stdout/stderr and returns the exit status.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    cli_main_with_io(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`cli_main`] with explicit output streams.
pub fn cli_main_with_io<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let msg = e.to_string();
                    let line = msg.lines().next().unwrap_or("invalid arguments");
                    let _ = writeln!(err, "edgeforge: {}", line.trim_start_matches("error: "));
                    2
                }
            };
        }
    };
    match run(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "edgeforge: {e}");
            1
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Detect(args) => detect(args, out),
        Command::Bench(args) => bench(args, out),
        Command::Criteria(args) => criteria(args, out),
        Command::SpeedupModel(args) => speedup_model(args, out),
    }
}

fn stdout_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn detect(args: DetectArgs, out: &mut dyn Write) -> Result<()> {
    let img = read_pgm_file(&args.input)?;
    let cfg = args
        .pipeline
        .config(args.workers.unwrap_or_else(available_workers))?;
    let result = run_pipeline(&img, &cfg)?;
    write_pgm_file(&args.output, &result.edges.to_image())?;

    if let Some(dir) = &args.dump_stages {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_pgm_file(dir.join("blurred.pgm"), &result.blurred)?;
        if let Some(g) = &result.gradient {
            write_pgm_file(dir.join("magnitude.pgm"), &g.magnitude_image())?;
        }
        if let Some(lap) = &result.laplacian {
            let abs: Vec<f64> = lap.pixels().iter().map(|v| v.abs()).collect();
            let max = abs.iter().copied().fold(0.0, f64::max);
            let scale = if max > 0.0 { 255.0 / max } else { 0.0 };
            let img = GrayImage::new(
                lap.width(),
                lap.height(),
                abs.iter().map(|v| v * scale).collect(),
            )?;
            write_pgm_file(dir.join("laplacian.pgm"), &img)?;
        }
        write_pgm_file(dir.join("thinned.pgm"), &result.thinned.to_image())?;
    }

    writeln!(
        out,
        "{} edge pixels of {} written to {}",
        result.edges.edge_count(),
        img.width() * img.height(),
        args.output.display()
    )
    .map_err(stdout_err)
}

fn parse_size(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidArgument(format!("expected WIDTHxHEIGHT, got '{s}'"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let w: usize = w.trim().parse().map_err(|_| bad())?;
    let h: usize = h.trim().parse().map_err(|_| bad())?;
    if w == 0 || h == 0 {
        return Err(bad());
    }
    Ok((w, h))
}

fn bench(args: BenchArgs, out: &mut dyn Write) -> Result<()> {
    let (img, label) = match &args.input {
        Some(path) => (read_pgm_file(path)?, path.display().to_string()),
        None => {
            let (w, h) = parse_size(&args.noise)?;
            (
                GrayImage::noise(w, h, args.seed),
                format!("noise {w}x{h} seed {}", args.seed),
            )
        }
    };
    let cfg = args.pipeline.config(1)?;
    let mut target = PipelineTarget::new(&img, label, cfg);
    let mut opts = BenchOptions::new(args.workers_list.clone(), args.reps);
    opts.worker_cap = args.worker_cap;
    let report = crate::bench::run_benchmark_with(&mut target, &opts)?;
    let text = match args.format {
        FormatArg::Csv => report.to_csv(),
        FormatArg::Json => report.to_json()?,
    };
    match &args.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => out.write_all(text.as_bytes()).map_err(stdout_err),
    }
}

/// Reads `T s0 s1 ... sN` (whitespace separated, `#` starts a comment).
fn read_sample_file(path: &Path) -> Result<(f64, Vec<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut values = Vec::new();
    for line in text.lines() {
        let content = line.split('#').next().unwrap_or("");
        for tok in content.split([' ', '\t', ',']).filter(|t| !t.is_empty()) {
            let v: f64 = tok.parse().map_err(|_| {
                Error::InvalidArgument(format!("{}: '{tok}' is not a number", path.display()))
            })?;
            values.push(v);
        }
    }
    if values.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{}: no support value",
            path.display()
        )));
    }
    let support = values.remove(0);
    Ok((support, values))
}

fn criteria(args: CriteriaArgs, out: &mut dyn Write) -> Result<()> {
    let (support, samples) = read_sample_file(&args.filter)?;
    let filter = Filter1D::new(support, samples)?;
    let model = EdgeModel::new(args.amplitude, args.noise_sigma)?;
    let snr = snr_criterion(&filter, &model)?;
    writeln!(out, "snr {}", sig6(snr)).map_err(stdout_err)?;
    match minimal_response_criterion(&filter) {
        Ok(x) => writeln!(out, "minimal_response {}", sig6(x)),
        Err(e) => writeln!(out, "minimal_response n/a ({e})"),
    }
    .map_err(stdout_err)?;
    if let Some(path) = &args.density {
        let (support, samples) = read_sample_file(path)?;
        let density = LocalizationDensity::normalized(support, samples)?;
        writeln!(
            out,
            "localization {}",
            sig6(localization_criterion(&density)?)
        )
        .map_err(stdout_err)?;
    }
    Ok(())
}

fn speedup_model(args: SpeedupArgs, out: &mut dyn Write) -> Result<()> {
    let perf = match args.perf_exponent {
        None => PerfModel::Sqrt,
        Some(a) => PerfModel::Power(a),
    };
    match args.r {
        Some(r) => {
            let model = SpeedupModel::with_perf(args.f, args.n, r, perf)?;
            writeln!(out, "{}", sig6(asymmetric_speedup(&model))).map_err(stdout_err)
        }
        None => {
            writeln!(out, "n,r,perf_r,speedup").map_err(stdout_err)?;
            let mut r = 1;
            while r <= args.n {
                let model = SpeedupModel::with_perf(args.f, args.n, r, perf)?;
                writeln!(
                    out,
                    "{},{},{},{}",
                    args.n,
                    r,
                    sig6(perf.eval(f64::from(r))),
                    sig6(asymmetric_speedup(&model))
                )
                .map_err(stdout_err)?;
                r *= 2;
            }
            Ok(())
        }
    }
}

/// Formats with six significant digits.
pub fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = cli_main_with_io(
            std::iter::once("edgeforge").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig6(4.705882352941177), "4.70588");
        assert_eq!(sig6(8.0), "8.00000");
        assert_eq!(sig6(123.456789), "123.457");
        assert_eq!(sig6(0.5), "0.500000");
        assert_eq!(sig6(1234567.0), "1234567");
    }

    #[test]
    fn speedup_model_value() {
        let (code, out, _) = run_cli(&["speedup-model", "--f", "0.9", "--n", "8", "--r", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "4.70588");
    }

    #[test]
    fn speedup_model_table() {
        let (code, out, _) = run_cli(&["speedup-model", "--f", "1", "--n", "8"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1], "8,1,1.00000,8.00000");
    }

    #[test]
    fn unknown_flag_is_one_line() {
        let (code, _, err) = run_cli(&["detect", "--bogus"]);
        assert_ne!(code, 0);
        assert_eq!(err.lines().count(), 1, "{err}");
    }

    #[test]
    fn bad_model_is_reported() {
        let (code, _, err) = run_cli(&["speedup-model", "--f", "2", "--n", "8", "--r", "1"]);
        assert_eq!(code, 1);
        assert!(err.contains("f must lie in"));
    }

    #[test]
    fn size_parsing() {
        assert_eq!(parse_size("640x480").unwrap(), (640, 480));
        assert!(parse_size("640").is_err());
        assert!(parse_size("0x5").is_err());
    }
}
