//! End-to-end edge detection: smoothing, gradient, thinning, thresholding,
//! tracing.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{build_gaussian_kernel, gaussian_blur_logged, DEFAULT_SIGMA};
use crate::gradient::{laplacian_logged, sobel_logged, GradientField};
use crate::hysteresis::{
    double_threshold_par, trace_edges, trace_edges_parallel, EdgeMap, Thresholds,
};
use crate::image::GrayImage;
use crate::nms::{non_max_suppress_logged, ThinnedField};
use crate::parallel::{evenness_ratio, fill_rows_logged, BandLog, StageTiming, WorkerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HysteresisMode {
    #[default]
    Serial,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    #[default]
    Canny,
    Laplacian,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    /// Derived from the strongest thinned magnitude, see [`Thresholds::auto`].
    #[default]
    Auto,
    Absolute(Thresholds),
}

macro_rules! lowercase_enum_text {
    ($ty:ty, $($variant:ident => $text:literal),+) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(<$ty>::$variant => $text),+ })
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok(<$ty>::$variant),)+
                    other => Err(Error::InvalidArgument(format!(
                        "unknown {} '{other}'", stringify!($ty)
                    ))),
                }
            }
        }
    };
}

lowercase_enum_text!(HysteresisMode, Serial => "serial", Parallel => "parallel");
lowercase_enum_text!(Operator, Canny => "canny", Laplacian => "laplacian");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub sigma: f64,
    pub thresholds: ThresholdMode,
    pub workers: WorkerConfig,
    pub hysteresis: HysteresisMode,
    pub operator: Operator,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            sigma: DEFAULT_SIGMA,
            thresholds: ThresholdMode::Auto,
            workers: WorkerConfig::default(),
            hysteresis: HysteresisMode::Serial,
            operator: Operator::Canny,
        }
    }
}

impl PipelineConfig {
    pub fn with_workers(mut self, workers: WorkerConfig) -> Self {
        self.workers = workers;
        self
    }
}

/// Final edges plus every intermediate the pipeline produced.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub blurred: GrayImage,
    /// Sobel field; `None` for the Laplacian operator.
    pub gradient: Option<GradientField>,
    /// Laplacian response; `None` for the Canny operator.
    pub laplacian: Option<GrayImage>,
    /// Edge-strength field fed to thresholding (NMS output for Canny,
    /// zero-crossing strength for the Laplacian).
    pub thinned: ThinnedField,
    pub thresholds: Option<Thresholds>,
    pub edges: EdgeMap,
}

/// Stage labels as they appear in timing records.
pub mod stage {
    pub const GAUSSIAN: &str = "gaussian";
    pub const SOBEL: &str = "sobel";
    pub const LAPLACIAN: &str = "laplacian";
    pub const NMS: &str = "nms";
    pub const ZERO_CROSSING: &str = "zero_crossing";
    pub const THRESHOLD: &str = "threshold";
    pub const HYSTERESIS: &str = "hysteresis";
    pub const PIPELINE: &str = "pipeline";
}

/// Runs the configured operator. Output is bit-identical for any worker count.
pub fn run_pipeline(img: &GrayImage, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    execute(img, cfg, &mut |_, _, _| {})
}

/// [`run_pipeline`] that also returns one [`StageTiming`] per stage, in order.
pub fn run_pipeline_profiled(
    img: &GrayImage,
    cfg: &PipelineConfig,
) -> Result<(PipelineOutput, Vec<StageTiming>)> {
    let mut timings = Vec::new();
    let workers = cfg.workers.workers();
    let rows = img.height();
    let out = execute(img, cfg, &mut |name, wall_ns, log: Option<&BandLog>| {
        timings.push(StageTiming {
            stage_name: name.to_string(),
            workers,
            wall_ns,
            rows_processed: rows,
            band_ns: log.map(BandLog::per_band_totals).unwrap_or_default(),
        });
    })?;
    Ok((out, timings))
}

type StageSink<'a> = dyn FnMut(&'static str, u64, Option<&BandLog>) + 'a;

fn timed<T>(
    sink: &mut StageSink<'_>,
    name: &'static str,
    banded: bool,
    f: impl FnOnce(Option<&BandLog>) -> T,
) -> T {
    let log = banded.then(BandLog::new);
    let start = Instant::now();
    let out = f(log.as_ref());
    let ns = start.elapsed().as_nanos() as u64;
    sink(name, ns, log.as_ref());
    out
}

fn execute(
    img: &GrayImage,
    cfg: &PipelineConfig,
    sink: &mut StageSink<'_>,
) -> Result<PipelineOutput> {
    let kernel = build_gaussian_kernel(cfg.sigma)?;
    let workers = &cfg.workers;

    let blurred = timed(sink, stage::GAUSSIAN, true, |log| {
        gaussian_blur_logged(img, &kernel, workers, log)
    });

    let (gradient, laplacian, thinned) = match cfg.operator {
        Operator::Canny => {
            let grad = timed(sink, stage::SOBEL, true, |log| {
                sobel_logged(&blurred, workers, log)
            });
            let thin = timed(sink, stage::NMS, true, |log| {
                non_max_suppress_logged(&grad, workers, log)
            });
            (Some(grad), None, thin)
        }
        Operator::Laplacian => {
            let lap = timed(sink, stage::LAPLACIAN, true, |log| {
                laplacian_logged(&blurred, workers, log)
            });
            let strength = timed(sink, stage::ZERO_CROSSING, true, |log| {
                zero_crossing_strength(&lap, workers, log)
            });
            (None, Some(lap), strength)
        }
    };

    let labeled = timed(sink, stage::THRESHOLD, false, |_| {
        let t = match cfg.thresholds {
            ThresholdMode::Absolute(t) => t,
            ThresholdMode::Auto => {
                let max = thinned.max_magnitude_par(workers);
                if max == 0.0 {
                    return None;
                }
                Thresholds::auto(max)
            }
        };
        Some((t, double_threshold_par(&thinned, &t, workers)))
    });

    let (thresholds, edges) = match labeled {
        Some((t, map)) => {
            let edges = timed(sink, stage::HYSTERESIS, false, |_| match cfg.hysteresis {
                HysteresisMode::Serial => trace_edges(&map),
                HysteresisMode::Parallel => trace_edges_parallel(&map, workers),
            });
            (Some(t), edges)
        }
        None => {
            sink(stage::HYSTERESIS, 0, None);
            (None, EdgeMap::empty(img.width(), img.height()))
        }
    };

    Ok(PipelineOutput {
        blurred,
        gradient,
        laplacian,
        thinned,
        thresholds,
        edges,
    })
}

/// Strength of sign changes of the Laplacian toward the right and lower
/// neighbors: `max |L(p) - L(q)|` over neighbors `q` with `L(p)·L(q) < 0`.
fn zero_crossing_strength(
    lap: &GrayImage,
    cfg: &WorkerConfig,
    log: Option<&BandLog>,
) -> ThinnedField {
    let (w, h) = (lap.width(), lap.height());
    let mut out = vec![0.0; w * h];
    fill_rows_logged(&mut out, w, cfg, log, |y, row| {
        let cur = lap.row(y);
        let below = (y + 1 < h).then(|| lap.row(y + 1));
        for (x, o) in row.iter_mut().enumerate() {
            let v = cur[x];
            let mut best = 0.0f64;
            if x + 1 < w && v * cur[x + 1] < 0.0 {
                best = best.max((v - cur[x + 1]).abs());
            }
            if let Some(b) = below {
                if v * b[x] < 0.0 {
                    best = best.max((v - b[x]).abs());
                }
            }
            *o = best;
        }
    });
    ThinnedField::new(w, h, out)
}

/// Max/min band-time ratio of a stage timing (1.0 when not banded).
pub fn stage_evenness(t: &StageTiming) -> f64 {
    evenness_ratio(&t.band_ns)
}
