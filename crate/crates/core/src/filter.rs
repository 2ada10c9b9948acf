//! Gaussian smoothing as two separable, row-parallel passes.

use crate::error::{Error, Result};
use crate::image::{clamp_index, GrayImage};
use crate::parallel::{fill_rows_logged, BandLog, WorkerConfig};

/// Conventional Canny smoothing scale used when none is given.
pub const DEFAULT_SIGMA: f64 = 1.4;

/// Sampled, normalized 1-D Gaussian of half-width `radius = ceil(3 sigma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel {
    sigma: f64,
    radius: usize,
    weights: Vec<f64>,
}

impl GaussianKernel {
    pub fn new(sigma: f64) -> Result<Self> {
        build_gaussian_kernel(sigma)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

pub fn build_gaussian_kernel(sigma: f64) -> Result<GaussianKernel> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidSigma(sigma));
    }
    let radius = (3.0 * sigma).ceil() as usize;
    let two_var = 2.0 * sigma * sigma;
    let raw: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let d = i as f64 - radius as f64;
            (-d * d / two_var).exp()
        })
        .collect();
    // Sum outward-in pairs so the total does not depend on tap direction.
    let mut sum = raw[radius];
    for d in (1..=radius).rev() {
        sum += raw[radius - d] + raw[radius + d];
    }
    let mut weights: Vec<f64> = raw.iter().map(|w| w / sum).collect();
    // Mirror to make symmetry exact.
    for d in 1..=radius {
        weights[radius + d] = weights[radius - d];
    }
    Ok(GaussianKernel {
        sigma,
        radius,
        weights,
    })
}

/// Separable Gaussian blur, horizontal pass then vertical pass, replicate
/// borders. Taps are accumulated left to right (top to bottom) so each
/// output pixel is the same floating-point sum for any worker count.
pub fn gaussian_blur(img: &GrayImage, kernel: &GaussianKernel, cfg: &WorkerConfig) -> GrayImage {
    gaussian_blur_logged(img, kernel, cfg, None)
}

pub(crate) fn gaussian_blur_logged(
    img: &GrayImage,
    kernel: &GaussianKernel,
    cfg: &WorkerConfig,
    log: Option<&BandLog>,
) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let r = kernel.radius as isize;
    let weights = kernel.weights();

    let mut horizontal = vec![0.0; w * h];
    fill_rows_logged(&mut horizontal, w, cfg, log, |y, out| {
        let src = img.row(y);
        for (x, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, &wt) in weights.iter().enumerate() {
                let sx = clamp_index(x as isize + i as isize - r, w);
                acc += wt * src[sx];
            }
            *o = acc;
        }
    });

    let mut vertical = vec![0.0; w * h];
    fill_rows_logged(&mut vertical, w, cfg, log, |y, out| {
        out.fill(0.0);
        for (i, &wt) in weights.iter().enumerate() {
            let sy = clamp_index(y as isize + i as isize - r, h);
            let src = &horizontal[sy * w..(sy + 1) * w];
            for (o, &s) in out.iter_mut().zip(src) {
                *o += wt * s;
            }
        }
    });

    GrayImage::from_parts(w, h, vertical)
}
