//! Scalability benchmark: per-stage wall times across worker counts, derived
//! speedups, a fitted parallel fraction, and asymmetric-model predictions.
//!
//! The harness is generic over a [`BenchTarget`]. [`PipelineTarget`] times the
//! real edge detector; [`SyntheticTarget`] follows a known Amdahl profile and
//! exists to check the harness itself.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::criteria::{asymmetric_speedup, fit_parallel_fraction, median, SpeedupModel};
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::parallel::{evenness_ratio, StageTiming, WorkerConfig};
use crate::pipeline::{run_pipeline_profiled, stage, PipelineConfig, ThresholdMode};

/// Largest worker count accepted unless overridden.
pub const DEFAULT_WORKER_CAP: usize = 64;
pub const DEFAULT_REPETITIONS: usize = 5;
pub const MIN_REPETITIONS: usize = 3;

/// Exact header of the raw-records section of the CSV report.
pub const CSV_HEADER: &str = "stage,workers,repetition,wall_ns";

/// Something the harness can time at different worker counts.
pub trait BenchTarget {
    /// Free-form description stored under `config` in the report.
    fn describe(&self) -> serde_json::Value;

    fn image_info(&self) -> ImageInfo;

    /// Runs once with `workers` executors. Must include a
    /// [`stage::PIPELINE`] entry covering the whole run.
    fn run_once(&mut self, workers: usize) -> Result<Vec<StageTiming>>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageInfo {
    pub label: String,
    pub width: usize,
    pub height: usize,
}

/// Times [`run_pipeline_profiled`] on one image.
pub struct PipelineTarget<'a> {
    image: &'a GrayImage,
    label: String,
    config: PipelineConfig,
}

impl<'a> PipelineTarget<'a> {
    pub fn new(image: &'a GrayImage, label: impl Into<String>, config: PipelineConfig) -> Self {
        Self {
            image,
            label: label.into(),
            config,
        }
    }
}

impl BenchTarget for PipelineTarget<'_> {
    fn describe(&self) -> serde_json::Value {
        let thresholds = match self.config.thresholds {
            ThresholdMode::Auto => json!("auto"),
            ThresholdMode::Absolute(t) => json!({ "low": t.low(), "high": t.high() }),
        };
        json!({
            "target": "pipeline",
            "sigma": self.config.sigma,
            "thresholds": thresholds,
            "hysteresis": self.config.hysteresis.to_string(),
            "operator": self.config.operator.to_string(),
            "band_granularity": self.config.workers.band_granularity(),
        })
    }

    fn image_info(&self) -> ImageInfo {
        ImageInfo {
            label: self.label.clone(),
            width: self.image.width(),
            height: self.image.height(),
        }
    }

    fn run_once(&mut self, workers: usize) -> Result<Vec<StageTiming>> {
        let wc = WorkerConfig::new(workers, self.config.workers.band_granularity())?;
        let cfg = self.config.with_workers(wc);
        let start = Instant::now();
        let (_, mut timings) = run_pipeline_profiled(self.image, &cfg)?;
        let total = start.elapsed().as_nanos() as u64;
        timings.push(StageTiming {
            stage_name: stage::PIPELINE.to_string(),
            workers,
            wall_ns: total,
            rows_processed: self.image.height(),
            band_ns: Vec::new(),
        });
        Ok(timings)
    }
}

/// How a [`SyntheticTarget`] produces its time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticMode {
    /// Sleep for the modeled duration and report the measured time.
    Sleep,
    /// Report the modeled duration without waiting.
    Inject,
}

/// A workload that takes `serial + parallel / workers`.
#[derive(Debug, Clone)]
pub struct SyntheticTarget {
    pub serial: Duration,
    pub parallel: Duration,
    pub mode: SyntheticMode,
}

impl SyntheticTarget {
    /// Total single-worker time `unit`, of which fraction `f` parallelizes.
    pub fn amdahl(unit: Duration, f: f64, mode: SyntheticMode) -> Self {
        Self {
            serial: unit.mul_f64(1.0 - f),
            parallel: unit.mul_f64(f),
            mode,
        }
    }

    fn modeled(&self, workers: usize) -> Duration {
        self.serial + self.parallel / workers as u32
    }
}

impl BenchTarget for SyntheticTarget {
    fn describe(&self) -> serde_json::Value {
        json!({
            "target": "synthetic",
            "serial_ns": self.serial.as_nanos() as u64,
            "parallel_ns": self.parallel.as_nanos() as u64,
            "mode": format!("{:?}", self.mode).to_lowercase(),
        })
    }

    fn image_info(&self) -> ImageInfo {
        ImageInfo {
            label: "synthetic".into(),
            width: 0,
            height: 0,
        }
    }

    fn run_once(&mut self, workers: usize) -> Result<Vec<StageTiming>> {
        let modeled = self.modeled(workers);
        let wall_ns = match self.mode {
            SyntheticMode::Inject => modeled.as_nanos() as u64,
            SyntheticMode::Sleep => {
                let start = Instant::now();
                std::thread::sleep(modeled);
                start.elapsed().as_nanos() as u64
            }
        };
        Ok(vec![StageTiming {
            stage_name: stage::PIPELINE.to_string(),
            workers,
            wall_ns,
            rows_processed: 0,
            band_ns: Vec::new(),
        }])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchOptions {
    pub worker_counts: Vec<usize>,
    pub repetitions: usize,
    pub worker_cap: usize,
    /// Run each worker count once, unrecorded, before measuring.
    pub warmup: bool,
}

impl BenchOptions {
    pub fn new(worker_counts: Vec<usize>, repetitions: usize) -> Self {
        Self {
            worker_counts,
            repetitions,
            worker_cap: DEFAULT_WORKER_CAP,
            warmup: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.repetitions < MIN_REPETITIONS {
            return Err(Error::InvalidArgument(format!(
                "need at least {MIN_REPETITIONS} repetitions, got {}",
                self.repetitions
            )));
        }
        if !self.worker_counts.contains(&1) {
            return Err(Error::InvalidArgument(
                "worker counts must include 1".into(),
            ));
        }
        if let Some(&w) = self
            .worker_counts
            .iter()
            .find(|&&w| w == 0 || w > self.worker_cap)
        {
            return Err(Error::InvalidArgument(format!(
                "worker count {w} outside 1..={}",
                self.worker_cap
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub stage: String,
    pub workers: usize,
    pub repetition: usize,
    pub wall_ns: u64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub band_ns: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupEntry {
    pub stage: String,
    pub workers: usize,
    pub median_ns: f64,
    /// `median(T(1)) / median(T(workers))`.
    pub speedup: f64,
    /// Median over repetitions of the max/min band-time ratio.
    pub evenness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymmetricPrediction {
    pub n: u32,
    pub r: u32,
    pub perf_r: f64,
    pub speedup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub image: ImageInfo,
    pub config: serde_json::Value,
    pub records: Vec<BenchRecord>,
    pub speedups: Vec<SpeedupEntry>,
    /// Fitted on whole-pipeline times; `None` with a single worker count.
    pub fitted_parallel_fraction: Option<f64>,
    pub asymmetric_predictions: Vec<AsymmetricPrediction>,
}

/// Resource budgets used for the asymmetric-model table.
pub const PREDICTION_BUDGETS: [u32; 5] = [4, 8, 16, 32, 64];
/// Fast-core sizes used for the asymmetric-model table.
pub const PREDICTION_CORE_SIZES: [u32; 5] = [1, 2, 4, 8, 16];

/// Benchmarks the edge pipeline on `img`.
pub fn run_benchmark(
    img: &GrayImage,
    worker_counts: &[usize],
    repetitions: usize,
    cfg: &PipelineConfig,
) -> Result<BenchReport> {
    let mut target = PipelineTarget::new(img, "image", *cfg);
    run_benchmark_with(
        &mut target,
        &BenchOptions::new(worker_counts.to_vec(), repetitions),
    )
}

/// Runs `target` for every worker count and repetition and derives the report.
///
/// Repetitions are interleaved across worker counts so slow drift in machine
/// state affects every count alike.
pub fn run_benchmark_with(
    target: &mut dyn BenchTarget,
    opts: &BenchOptions,
) -> Result<BenchReport> {
    opts.validate()?;
    let mut counts = opts.worker_counts.clone();
    counts.sort_unstable();
    counts.dedup();

    if opts.warmup {
        for &w in &counts {
            target.run_once(w)?;
        }
    }

    let mut records = Vec::new();
    for rep in 0..opts.repetitions {
        for &w in &counts {
            for t in target.run_once(w)? {
                records.push(BenchRecord {
                    stage: t.stage_name,
                    workers: w,
                    repetition: rep,
                    wall_ns: t.wall_ns,
                    band_ns: t.band_ns,
                });
            }
        }
    }

    let speedups = derive_speedups(&records);
    let pipeline_times: Vec<(usize, f64)> = records
        .iter()
        .filter(|r| r.stage == stage::PIPELINE)
        .map(|r| (r.workers, r.wall_ns.max(1) as f64))
        .collect();
    let fitted = if counts.len() >= 2 {
        Some(fit_parallel_fraction(&pipeline_times)?)
    } else {
        None
    };
    let asymmetric_predictions = fitted.map(predictions).unwrap_or_default();

    let mut config = target.describe();
    if let Some(obj) = config.as_object_mut() {
        obj.insert("worker_counts".into(), json!(counts));
        obj.insert("repetitions".into(), json!(opts.repetitions));
        obj.insert("warmup".into(), json!(opts.warmup));
    }

    Ok(BenchReport {
        image: target.image_info(),
        config,
        records,
        speedups,
        fitted_parallel_fraction: fitted,
        asymmetric_predictions,
    })
}

fn derive_speedups(records: &[BenchRecord]) -> Vec<SpeedupEntry> {
    // Stage order of first appearance, then ascending workers.
    let mut order: Vec<&str> = Vec::new();
    let mut cells: BTreeMap<(usize, usize), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in records {
        let idx = match order.iter().position(|s| *s == r.stage) {
            Some(i) => i,
            None => {
                order.push(&r.stage);
                order.len() - 1
            }
        };
        let cell = cells.entry((idx, r.workers)).or_default();
        cell.0.push(r.wall_ns as f64);
        cell.1.push(evenness_ratio(&r.band_ns));
    }

    let mut base: BTreeMap<usize, f64> = BTreeMap::new();
    let mut medians = Vec::new();
    for ((idx, workers), (mut times, mut even)) in cells {
        let m = median(&mut times);
        if workers == 1 {
            base.insert(idx, m);
        }
        medians.push((idx, workers, m, median(&mut even)));
    }
    medians
        .into_iter()
        .map(|(idx, workers, m, evenness)| {
            let b = base.get(&idx).copied().unwrap_or(f64::NAN);
            SpeedupEntry {
                stage: order[idx].to_string(),
                workers,
                median_ns: m,
                speedup: if m > 0.0 { b / m } else { 1.0 },
                evenness,
            }
        })
        .collect()
}

fn predictions(f: f64) -> Vec<AsymmetricPrediction> {
    let mut out = Vec::new();
    for n in PREDICTION_BUDGETS {
        for r in PREDICTION_CORE_SIZES.into_iter().filter(|&r| r <= n) {
            let model = SpeedupModel::new(f, n, r).expect("valid table entry");
            out.push(AsymmetricPrediction {
                n,
                r,
                perf_r: model.perf().eval(f64::from(r)),
                speedup: asymmetric_speedup(&model),
            });
        }
    }
    out
}

impl BenchReport {
    /// Speedup entry for `stage` at `workers`.
    pub fn speedup(&self, stage: &str, workers: usize) -> Option<&SpeedupEntry> {
        self.speedups
            .iter()
            .find(|s| s.stage == stage && s.workers == workers)
    }

    /// Raw records under [`CSV_HEADER`], then a blank line and the derived
    /// per-stage table, then a blank line and the model summary.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.records {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                r.stage, r.workers, r.repetition, r.wall_ns
            );
        }
        s.push_str("\nstage,workers,median_ns,speedup,evenness\n");
        for e in &self.speedups {
            let _ = writeln!(
                s,
                "{},{},{:.0},{:.6},{:.4}",
                e.stage, e.workers, e.median_ns, e.speedup, e.evenness
            );
        }
        s.push_str("\nmetric,n,r,value\n");
        if let Some(f) = self.fitted_parallel_fraction {
            let _ = writeln!(s, "fitted_parallel_fraction,,,{f:.6}");
        }
        for p in &self.asymmetric_predictions {
            let _ = writeln!(s, "asymmetric_speedup,{},{},{:.6}", p.n, p.r, p.speedup);
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Report(e.to_string()))
    }
}
