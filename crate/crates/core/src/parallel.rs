//! Row-band parallel skeletons with a determinism contract.
//!
//! Work is split into contiguous bands of rows by [`plan_bands`] and each band
//! runs on its own scoped thread (the first band runs on the calling thread).
//! Every row is computed by the same code regardless of the partition, and
//! results are assembled in row order, so the output of any skeleton here is
//! bit-identical for every worker count.

use std::ops::Range;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default minimum number of rows handed to a single task.
pub const DEFAULT_BAND_GRANULARITY: usize = 16;

/// How many executors to use and how finely rows may be split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkerConfig {
    workers: usize,
    band_granularity: usize,
}

impl WorkerConfig {
    pub fn new(workers: usize, band_granularity: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::InvalidWorkers("workers must be at least 1".into()));
        }
        if band_granularity == 0 {
            return Err(Error::InvalidWorkers(
                "band granularity must be at least 1".into(),
            ));
        }
        Ok(Self {
            workers,
            band_granularity,
        })
    }

    /// `workers` executors with the default granularity.
    pub fn with_workers(workers: usize) -> Result<Self> {
        Self::new(workers, DEFAULT_BAND_GRANULARITY)
    }

    pub fn serial() -> Self {
        Self {
            workers: 1,
            band_granularity: DEFAULT_BAND_GRANULARITY,
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn band_granularity(&self) -> usize {
        self.band_granularity
    }
}

impl Default for WorkerConfig {
    /// One worker per logical CPU, 16-row granularity.
    fn default() -> Self {
        Self {
            workers: available_workers(),
            band_granularity: DEFAULT_BAND_GRANULARITY,
        }
    }
}

/// Logical CPU count as reported by the OS, at least 1.
pub fn available_workers() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}

/// Splits `0..height` into contiguous bands.
///
/// When there are enough rows for every worker to get at least
/// `band_granularity` rows, the rows are split into `workers` bands whose
/// sizes differ by at most one (larger bands first). Otherwise bands are
/// exactly `band_granularity` rows with a single shorter remainder band at
/// the end. The band count never exceeds `workers`.
pub fn plan_bands(height: usize, cfg: &WorkerConfig) -> Vec<Range<usize>> {
    if height == 0 {
        return Vec::new();
    }
    let workers = cfg.workers;
    let gran = cfg.band_granularity;

    if workers.saturating_mul(gran) <= height {
        let base = height / workers;
        let extra = height % workers;
        let mut bands = Vec::with_capacity(workers);
        let mut start = 0;
        for i in 0..workers {
            let len = base + usize::from(i < extra);
            bands.push(start..start + len);
            start += len;
        }
        bands
    } else {
        (0..height)
            .step_by(gran)
            .map(|s| s..(s + gran).min(height))
            .collect()
    }
}

/// Wall time spent by one band inside one skeleton call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandTiming {
    pub band: usize,
    pub rows: Range<usize>,
    pub wall_ns: u64,
}

/// Collects [`BandTiming`]s from instrumented skeleton calls.
#[derive(Debug, Default)]
pub struct BandLog {
    entries: Mutex<Vec<BandTiming>>,
}

impl BandLog {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&self, t: BandTiming) {
        self.entries.lock().expect("band log poisoned").push(t);
    }

    pub fn take(&self) -> Vec<BandTiming> {
        let mut v = std::mem::take(&mut *self.entries.lock().expect("band log poisoned"));
        v.sort_by_key(|t| (t.band, t.rows.start));
        v
    }

    /// Total time per band index across all logged calls, in band order.
    pub fn per_band_totals(&self) -> Vec<u64> {
        let entries = self.entries.lock().expect("band log poisoned");
        let n = entries.iter().map(|t| t.band + 1).max().unwrap_or(0);
        let mut totals = vec![0u64; n];
        for t in entries.iter() {
            totals[t.band] += t.wall_ns;
        }
        totals
    }
}

/// Max/min ratio of per-band times; 1.0 means perfectly even.
pub fn evenness_ratio(band_ns: &[u64]) -> f64 {
    let max = band_ns.iter().copied().max().unwrap_or(0);
    let min = band_ns.iter().copied().min().unwrap_or(0);
    if band_ns.len() <= 1 || max == 0 {
        1.0
    } else {
        max as f64 / min.max(1) as f64
    }
}

/// Timing of one stage execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage_name: String,
    pub workers: usize,
    pub wall_ns: u64,
    pub rows_processed: usize,
    /// Per-band wall time, summed over the stage's passes. Empty for stages
    /// that do not run on the band engine.
    pub band_ns: Vec<u64>,
}

fn run_banded<S, F>(bands: Vec<(usize, Range<usize>, S)>, log: Option<&BandLog>, f: F)
where
    S: Send,
    F: Fn(Range<usize>, S) + Sync,
{
    let run = |band: usize, rows: Range<usize>, slot: S| {
        let start = log.map(|_| Instant::now());
        f(rows.clone(), slot);
        if let (Some(log), Some(start)) = (log, start) {
            log.push(BandTiming {
                band,
                rows,
                wall_ns: start.elapsed().as_nanos() as u64,
            });
        }
    };

    let mut iter = bands.into_iter();
    let Some((first_idx, first_rows, first_slot)) = iter.next() else {
        return;
    };
    thread::scope(|s| {
        let run = &run;
        for (idx, rows, slot) in iter {
            s.spawn(move || run(idx, rows, slot));
        }
        run(first_idx, first_rows, first_slot);
    });
}

/// Fills a row-major `width`-wide buffer, one call of `row_fn(y, row_out)` per
/// row. Each band owns a disjoint slice of `out`.
pub fn fill_rows<T, F>(out: &mut [T], width: usize, cfg: &WorkerConfig, row_fn: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    fill_rows_logged(out, width, cfg, None, row_fn)
}

/// [`fill_rows`] that records per-band wall times into `log`.
pub fn fill_rows_logged<T, F>(
    out: &mut [T],
    width: usize,
    cfg: &WorkerConfig,
    log: Option<&BandLog>,
    row_fn: F,
) where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    fill_bands_logged(out, width, cfg, log, |rows, slab: &mut [T]| {
        for (y, row_out) in rows.zip(slab.chunks_mut(width)) {
            row_fn(y, row_out);
        }
    });
}

/// Hands each band its row range and the matching slab of `out`
/// (`rows.len() * width` elements).
pub fn fill_bands<T, F>(out: &mut [T], width: usize, cfg: &WorkerConfig, band_fn: F)
where
    T: Send,
    F: Fn(Range<usize>, &mut [T]) + Sync,
{
    fill_bands_logged(out, width, cfg, None, band_fn)
}

fn fill_bands_logged<T, F>(
    out: &mut [T],
    width: usize,
    cfg: &WorkerConfig,
    log: Option<&BandLog>,
    band_fn: F,
) where
    T: Send,
    F: Fn(Range<usize>, &mut [T]) + Sync,
{
    assert!(width > 0, "row width must be positive");
    assert_eq!(out.len() % width, 0, "buffer is not a whole number of rows");
    let height = out.len() / width;
    let mut rest = out;
    let mut slots = Vec::new();
    for (i, band) in plan_bands(height, cfg).into_iter().enumerate() {
        let (head, tail) = rest.split_at_mut(band.len() * width);
        rest = tail;
        slots.push((i, band, head));
    }
    run_banded(slots, log, band_fn);
}

/// Evaluates `row_fn` for rows `0..height` and returns the results in row order.
pub fn parallel_row_map<T, F>(height: usize, cfg: &WorkerConfig, row_fn: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let mut out: Vec<Option<T>> = (0..height).map(|_| None).collect();
    if height > 0 {
        fill_rows(&mut out, 1, cfg, |y, slot| slot[0] = Some(row_fn(y)));
    }
    out.into_iter()
        .map(|v| v.expect("every row is visited exactly once"))
        .collect()
}

/// Fallible [`parallel_row_map`].
///
/// When a row fails, the remaining bands stop before their next row. The
/// returned error is the one from the lowest-indexed band that failed.
pub fn try_parallel_row_map<T, E, F>(
    height: usize,
    cfg: &WorkerConfig,
    row_fn: F,
) -> std::result::Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> std::result::Result<T, E> + Sync,
{
    let bands = plan_bands(height, cfg);
    let stop = AtomicBool::new(false);
    let mut outputs: Vec<std::result::Result<Vec<T>, E>> =
        bands.iter().map(|_| Ok(Vec::new())).collect();
    let slots = bands
        .into_iter()
        .zip(outputs.iter_mut())
        .enumerate()
        .map(|(i, (rows, slot))| (i, rows, slot))
        .collect();
    run_banded(slots, None, |rows, slot| {
        let mut acc = Vec::with_capacity(rows.len());
        for y in rows {
            if stop.load(Ordering::Relaxed) {
                break;
            }
            match row_fn(y) {
                Ok(v) => acc.push(v),
                Err(e) => {
                    stop.store(true, Ordering::Relaxed);
                    *slot = Err(e);
                    return;
                }
            }
        }
        *slot = Ok(acc);
    });
    let mut result = Vec::with_capacity(height);
    for band in outputs {
        result.extend(band?);
    }
    Ok(result)
}

/// Per-band reduction combined left to right in band order.
///
/// The band partition depends on the worker count, so the result is only
/// worker-invariant when `combine` is associative for the values involved
/// (e.g. `max`); for floating-point sums, reduce per row via
/// [`parallel_row_map`] and fold serially instead.
pub fn band_reduce<T, B, C>(height: usize, cfg: &WorkerConfig, band_fn: B, combine: C) -> Option<T>
where
    T: Send,
    B: Fn(Range<usize>) -> T + Sync,
    C: Fn(T, T) -> T,
{
    let bands = plan_bands(height, cfg);
    let mut partials: Vec<Option<T>> = bands.iter().map(|_| None).collect();
    let slots = bands
        .into_iter()
        .zip(partials.iter_mut())
        .enumerate()
        .map(|(i, (rows, slot))| (i, rows, slot))
        .collect();
    run_banded(slots, None, |rows, slot: &mut Option<T>| {
        *slot = Some(band_fn(rows));
    });
    partials.into_iter().flatten().reduce(combine)
}
