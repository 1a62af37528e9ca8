//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on processing errors, 2 on usage or
//! configuration errors.

pub mod benchmark;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::fusion::{fuse, FusionMethod, FusionRule};
use crate::imgio::{load_image, register_pair, save_image};
use crate::metrics::full_report;
use crate::optimizer::{GaConfig, GaTrace, WeightPair};

pub use benchmark::{run_benchmark, BenchmarkReport};
pub use config::BenchmarkConfig;

/// Overrides the directory that reports are written to.
pub const REPORT_DIR_ENV: &str = "WAVEFUSE_REPORT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROCESSING: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "wavefuse", version, about = "Wavelet-based multimodal image fusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fuse two source images.
    Fuse(FuseArgs),
    /// Compute objective quality metrics for a fused image.
    Metrics(MetricsArgs),
    /// Run every configured method on every configured dataset.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
struct FuseArgs {
    /// dwt, udwt, dwt-ga or udwt-ga
    #[arg(long)]
    method: FusionMethod,
    #[arg(long)]
    in1: PathBuf,
    #[arg(long)]
    in2: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Write the chosen weights as JSON (GA methods only).
    #[arg(long)]
    weights_out: Option<PathBuf>,
    /// Include the per-generation optimizer trace in the weights file.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    ga_diff: Option<f64>,
    #[arg(long)]
    ga_trials: Option<usize>,
    #[arg(long)]
    ga_max_gen: Option<usize>,
    #[arg(long)]
    ga_eps: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricsFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    #[arg(long)]
    src1: PathBuf,
    #[arg(long)]
    src2: PathBuf,
    #[arg(long)]
    fused: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: MetricsFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Processing(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) => CliError::Usage(e.to_string()),
            _ => CliError::Processing(e.to_string()),
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Fuse(a) => cmd_fuse(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Benchmark(a) => cmd_benchmark(a),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Processing(msg)) => {
            eprintln!("error: {msg}");
            EXIT_PROCESSING
        }
    }
}

#[derive(Serialize)]
struct WeightsFile<'a> {
    wv: f64,
    wt: f64,
    per_channel: &'a [WeightPair],
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<&'a [GaTrace]>,
}

fn cmd_fuse(a: FuseArgs) -> Result<i32, CliError> {
    let defaults = GaConfig::default();
    let cfg = GaConfig {
        initial_diff: a.ga_diff.unwrap_or(defaults.initial_diff),
        trials_per_generation: a.ga_trials.unwrap_or(defaults.trials_per_generation),
        max_generations: a.ga_max_gen.unwrap_or(defaults.max_generations),
        termination_epsilon: a.ga_eps.unwrap_or(defaults.termination_epsilon),
    };
    cfg.validate()?;
    if a.weights_out.is_some() && a.method.rule() != FusionRule::GaWeighted {
        return Err(CliError::Usage(format!(
            "--weights-out requires a GA method, not {}",
            a.method
        )));
    }

    let x = load_image(&a.in1)?;
    let y = load_image(&a.in2)?;
    let (x, y) = register_pair(&x, &y)?;
    let result = fuse(&x, &y, a.method, &cfg)?;
    save_image(&result.fused, &a.out)?;

    if let Some(path) = &a.weights_out {
        let w = result.weights.as_ref().expect("GA methods report weights");
        let file = WeightsFile {
            wv: w.mean.wv,
            wt: w.mean.wt,
            per_channel: &w.per_channel,
            trace: if a.trace { result.traces.as_deref() } else { None },
        };
        let mut json = serde_json::to_string_pretty(&file).expect("weights serialize");
        json.push('\n');
        std::fs::write(path, json).map_err(Error::Io)?;
    }
    Ok(EXIT_OK)
}

fn cmd_metrics(a: MetricsArgs) -> Result<i32, CliError> {
    let v = load_image(&a.src1)?;
    let t = load_image(&a.src2)?;
    let f = load_image(&a.fused)?;
    let (v, t) = register_pair(&v, &t)?;
    let report = full_report(&v, &t, &f)?;
    let body = match a.format {
        MetricsFormat::Json => format!("{}\n", report.to_json()),
        MetricsFormat::Csv => report.to_csv(),
    };
    let ext = match a.format {
        MetricsFormat::Json => "json",
        MetricsFormat::Csv => "csv",
    };
    emit(&body, a.out.as_deref(), &format!("metrics.{ext}"))?;
    Ok(EXIT_OK)
}

fn cmd_benchmark(a: BenchmarkArgs) -> Result<i32, CliError> {
    let cfg = BenchmarkConfig::load(&a.config).map_err(CliError::Usage)?;
    let report = run_benchmark(&cfg);
    let (body, ext) = match a.format {
        ReportFormat::Table => (report.to_table(), "txt"),
        ReportFormat::Json => (report.to_json(), "json"),
    };
    emit(&body, a.out.as_deref(), &format!("benchmark_report.{ext}"))?;
    Ok(if report.failed() {
        EXIT_PROCESSING
    } else {
        EXIT_OK
    })
}

/// Where a report goes: `--out` (relative paths land under the report
/// directory override when set), else a default file in the override
/// directory, else stdout.
fn report_destination(out: Option<&Path>, default_name: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(REPORT_DIR_ENV).map(PathBuf::from);
    match (out, dir) {
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(d)) => Some(d.join(default_name)),
        (None, None) => None,
    }
}

fn emit(body: &str, out: Option<&Path>, default_name: &str) -> Result<(), CliError> {
    match report_destination(out, default_name) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(Error::Io)?;
            }
            std::fs::write(&path, body).map_err(Error::Io)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes()).map_err(Error::Io)?;
        }
    }
    Ok(())
}
