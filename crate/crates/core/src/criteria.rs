//! Numeric evaluators for Canny's filter-design criteria and the asymmetric
//! multicore speedup model.
//!
//! Filters and densities are uniformly sampled on `[-T, T]`; integrals use the
//! composite trapezoid rule over the sample grid and derivatives use finite
//! differences, so everything here works from samples alone.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Sample count used when a caller does not pick one.
pub const DEFAULT_SAMPLES: usize = 1001;

/// A 1-D filter `f(x)` sampled at `count` evenly spaced points on `[-T, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Filter1D {
    support: f64,
    samples: Vec<f64>,
}

impl Filter1D {
    pub fn new(support: f64, samples: Vec<f64>) -> Result<Self> {
        validate_grid(support, &samples)?;
        Ok(Self { support, samples })
    }

    /// Samples `f` at `count` points spanning `[-support, support]`.
    pub fn from_fn(support: f64, count: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(support, sample_grid(support, count, f))
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn spacing(&self) -> f64 {
        spacing(self.support, self.samples.len())
    }
}

/// Step-edge amplitude `A` and white-noise amplitude `σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeModel {
    amplitude: f64,
    noise_sigma: f64,
}

impl EdgeModel {
    pub fn new(amplitude: f64, noise_sigma: f64) -> Result<Self> {
        for (name, v) in [("amplitude", amplitude), ("noise sigma", noise_sigma)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            amplitude,
            noise_sigma,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }
}

/// Probability density `Pr(y)` of edge displacement, sampled on `[-T, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationDensity {
    support: f64,
    samples: Vec<f64>,
}

/// How far the trapezoid integral of a density may stray from 1.
pub const DENSITY_NORMALIZATION_TOL: f64 = 1e-6;

impl LocalizationDensity {
    pub fn new(support: f64, samples: Vec<f64>) -> Result<Self> {
        validate_grid(support, &samples)?;
        if samples.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidArgument(
                "density samples must be non-negative".into(),
            ));
        }
        let mass = trapezoid(&samples, spacing(support, samples.len()));
        if (mass - 1.0).abs() > DENSITY_NORMALIZATION_TOL {
            return Err(Error::InvalidArgument(format!(
                "density integrates to {mass}, expected 1"
            )));
        }
        Ok(Self { support, samples })
    }

    /// Rescales non-negative samples to unit mass on the grid.
    pub fn normalized(support: f64, samples: Vec<f64>) -> Result<Self> {
        validate_grid(support, &samples)?;
        let mass = trapezoid(&samples, spacing(support, samples.len()));
        if mass <= 0.0 {
            return Err(Error::Degenerate("density has no mass"));
        }
        Self::new(support, samples.into_iter().map(|p| p / mass).collect())
    }

    /// Samples a non-negative `f` and rescales it to unit mass on the grid.
    pub fn normalized_from_fn(support: f64, count: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::normalized(support, sample_grid(support, count, f))
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

fn validate_grid(support: f64, samples: &[f64]) -> Result<()> {
    if !support.is_finite() || support <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "support must be positive and finite, got {support}"
        )));
    }
    if samples.len() < 3 || samples.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "sample count must be odd and at least 3, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("samples must be finite".into()));
    }
    Ok(())
}

fn spacing(support: f64, count: usize) -> f64 {
    2.0 * support / (count - 1) as f64
}

fn sample_grid(support: f64, count: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    if count < 2 {
        return (0..count).map(|_| f(0.0)).collect();
    }
    let h = spacing(support, count);
    let mid = (count - 1) / 2;
    (0..count)
        .map(|i| {
            // Index from the center so x = 0 and x = ±T are hit exactly.
            let x = (i as f64 - mid as f64) * h;
            let x = if i == 0 {
                -support
            } else if i == count - 1 {
                support
            } else {
                x
            };
            f(x)
        })
        .collect()
}

/// Composite trapezoid rule on uniformly spaced samples.
pub fn trapezoid(samples: &[f64], h: f64) -> f64 {
    match samples {
        [] | [_] => 0.0,
        [first, inner @ .., last] => h * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

/// Detection criterion `A |∫_{-T}^0 f| / (σ √∫_{-T}^T f²)`.
pub fn snr_criterion(filter: &Filter1D, model: &EdgeModel) -> Result<f64> {
    let h = filter.spacing();
    let mid = (filter.samples.len() - 1) / 2;
    let half = trapezoid(&filter.samples[..=mid], h);
    let squares: Vec<f64> = filter.samples.iter().map(|v| v * v).collect();
    let energy = trapezoid(&squares, h);
    if energy <= 0.0 {
        return Err(Error::Degenerate("filter is identically zero"));
    }
    Ok(model.amplitude * half.abs() / (model.noise_sigma * energy.sqrt()))
}

/// Localization criterion `1 / √∫ y² Pr(y) dy`.
pub fn localization_criterion(density: &LocalizationDensity) -> Result<f64> {
    let n = density.samples.len();
    let h = spacing(density.support, n);
    let mid = (n - 1) / 2;
    let moments: Vec<f64> = density
        .samples
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let y = (i as f64 - mid as f64) * h;
            y * y * p
        })
        .collect();
    let second_moment = trapezoid(&moments, h);
    if second_moment <= 0.0 {
        return Err(Error::Degenerate("density has zero second moment"));
    }
    Ok(1.0 / second_moment.sqrt())
}

/// First derivative by central differences, second-order one-sided at the ends.
fn first_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d
}

/// Second derivative by central differences, second-order one-sided at the ends.
fn second_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let h2 = h * h;
    let mut d = vec![0.0; n];
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    }
    d
}

/// Minimal-response criterion `2π √(∫ f′² / ∫ f″²)`: mean spacing of
/// response maxima to noise.
pub fn minimal_response_criterion(filter: &Filter1D) -> Result<f64> {
    let n = filter.samples.len();
    if n < 5 {
        return Err(Error::InvalidArgument(format!(
            "minimal response needs at least 5 samples, got {n}"
        )));
    }
    let h = filter.spacing();
    let d1 = first_derivative(&filter.samples, h);
    let d2 = second_derivative(&filter.samples, h);
    let sq = |v: &[f64]| v.iter().map(|x| x * x).collect::<Vec<_>>();
    let slope = trapezoid(&sq(&d1), h);
    let curvature = trapezoid(&sq(&d2), h);

    // Second differences of an affine filter are pure rounding noise.
    let scale = filter.samples.iter().fold(0.0f64, |m, v| m.max(v.abs())) / (h * h);
    let rms_curvature = (curvature / (2.0 * filter.support)).sqrt();
    if curvature <= 0.0 || rms_curvature <= 64.0 * f64::EPSILON * scale {
        return Err(Error::Degenerate("filter has no curvature (affine)"));
    }
    Ok(2.0 * PI * (slope / curvature).sqrt())
}

/// Sequential performance of a core built from `r` base-core resources.
#[derive(Debug, Clone, Copy, Default)]
pub enum PerfModel {
    /// `perf(r) = √r`.
    #[default]
    Sqrt,
    /// `perf(r) = r^alpha`.
    Power(f64),
    Custom(fn(f64) -> f64),
}

impl PerfModel {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            PerfModel::Sqrt => r.sqrt(),
            PerfModel::Power(alpha) => r.powf(*alpha),
            PerfModel::Custom(f) => f(r),
        }
    }
}

/// Parameters of the asymmetric multicore speedup model: parallel fraction
/// `f`, `n` base-core equivalents, of which `r` are fused into one fast core.
#[derive(Debug, Clone, Copy)]
pub struct SpeedupModel {
    f: f64,
    n: u32,
    r: u32,
    perf: PerfModel,
}

impl SpeedupModel {
    pub fn new(f: f64, n: u32, r: u32) -> Result<Self> {
        Self::with_perf(f, n, r, PerfModel::Sqrt)
    }

    pub fn with_perf(f: f64, n: u32, r: u32, perf: PerfModel) -> Result<Self> {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::InvalidArgument(format!(
                "f must lie in [0, 1], got {f}"
            )));
        }
        if n == 0 || r == 0 || r > n {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= r <= n, got n={n}, r={r}"
            )));
        }
        let p = perf.eval(f64::from(r));
        if !p.is_finite() || p <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "perf({r}) = {p} is not positive"
            )));
        }
        Ok(Self { f, n, r, perf })
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn perf(&self) -> PerfModel {
        self.perf
    }
}

/// `1 / ((1-f)/perf(r) + f/(perf(r) + n - r))`.
///
/// Evaluated as `perf / (1 - f·(1 - perf/P))` with `P = perf + n - r`, an
/// arrangement in which every rounding step is monotone, so the result is
/// non-decreasing in both `f` and `n`. `f = 1` short-circuits to the exact `P`.
pub fn asymmetric_speedup(model: &SpeedupModel) -> f64 {
    let perf = model.perf.eval(f64::from(model.r));
    let parallel = perf + f64::from(model.n - model.r);
    if model.f == 1.0 {
        return parallel;
    }
    perf / (1.0 - model.f * (1.0 - perf / parallel))
}

/// Classic Amdahl speedup on `w` workers, `1 / ((1-f) + f/w)`.
pub fn amdahl_speedup(f: f64, w: f64) -> f64 {
    w / ((1.0 - f) * w + f)
}

/// Search tolerance on `f` for [`fit_parallel_fraction`].
pub const FIT_TOLERANCE: f64 = 1e-6;

/// Least-squares estimate of the parallel fraction from `(workers, time)`
/// measurements.
///
/// Measured speedups `T(1)/T(w)` are fitted to `1/((1-f) + f/w)` over
/// `f ∈ [0, 1]` by golden-section search. When several measurements share a
/// worker count each contributes its own residual; `T(1)` is their median.
pub fn fit_parallel_fraction(timings: &[(usize, f64)]) -> Result<f64> {
    if let Some(&(w, t)) = timings
        .iter()
        .find(|(w, t)| *w == 0 || !t.is_finite() || *t <= 0.0)
    {
        return Err(Error::InvalidArgument(format!(
            "invalid timing ({w} workers, {t})"
        )));
    }
    let mut distinct: Vec<usize> = timings.iter().map(|(w, _)| *w).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 || distinct[0] != 1 {
        return Err(Error::InvalidArgument(
            "need at least two distinct worker counts including 1".into(),
        ));
    }
    let mut base: Vec<f64> = timings
        .iter()
        .filter(|(w, _)| *w == 1)
        .map(|(_, t)| *t)
        .collect();
    let t1 = median(&mut base);
    let points: Vec<(f64, f64)> = timings.iter().map(|&(w, t)| (w as f64, t1 / t)).collect();

    let sse = |f: f64| -> f64 {
        points
            .iter()
            .map(|&(w, s)| {
                let r = s - amdahl_speedup(f, w);
                r * r
            })
            .sum()
    };

    let best = golden_section_min(sse, 0.0, 1.0, FIT_TOLERANCE);
    Ok([0.0, best, 1.0]
        .into_iter()
        .min_by(|a, b| sse(*a).total_cmp(&sse(*b)))
        .expect("non-empty"))
}

fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Median of a non-empty slice (mean of the middle pair for even lengths).
pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
