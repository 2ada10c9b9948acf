//! Deterministic, data-parallel Canny edge detection.
//!
//! The pipeline is Gaussian smoothing ([`filter`]), Sobel gradients
//! ([`gradient`]), non-maximum suppression ([`nms`]) and hysteresis
//! thresholding ([`hysteresis`]). Every data-parallel stage runs on the
//! row-band skeletons in [`parallel`], which guarantee bit-identical output
//! for any worker count. Hysteresis tracing is serial by default; a
//! band-parallel union-find variant is available for comparison.
//!
//! Alongside the detector:
//!
//! - [`criteria`] evaluates the detection, localization and minimal-response
//!   criteria for sampled 1-D filters, and the asymmetric multicore speedup
//!   model.
//! - [`bench`] measures per-stage scaling across worker counts and fits the
//!   parallel fraction of the whole pipeline.
//! - [`cli`] backs the `edgeforge` binary.
//!
//! ```
//! use edgeforge::{run_pipeline, GrayImage, PipelineConfig, WorkerConfig};
//!
//! let img = GrayImage::from_fn(32, 32, |x, _| if x < 16 { 0.0 } else { 255.0 });
//! let cfg = PipelineConfig::default().with_workers(WorkerConfig::new(4, 1).unwrap());
//! let out = run_pipeline(&img, &cfg).unwrap();
//! assert!(out.edges.edge_count() > 0);
//! ```

pub mod bench;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod filter;
pub mod gradient;
pub mod hysteresis;
pub mod image;
pub mod nms;
pub mod parallel;
pub mod pipeline;

pub use error::{Error, PgmErrorKind, Result};
pub use filter::{build_gaussian_kernel, gaussian_blur, GaussianKernel};
pub use gradient::{laplacian, quantize_orientation, sobel, GradientField, Orientation};
pub use hysteresis::{
    double_threshold, trace_edges, trace_edges_parallel, EdgeLabel, EdgeMap, Thresholds,
};
pub use image::{load_pgm, save_pgm, GrayImage, PixelCoord};
pub use nms::{non_max_suppress, ThinnedField};
pub use parallel::{parallel_row_map, plan_bands, WorkerConfig};
pub use pipeline::{
    run_pipeline, HysteresisMode, Operator, PipelineConfig, PipelineOutput, ThresholdMode,
};
