//! Non-maximum suppression along the quantized gradient direction.

use crate::gradient::{rescale_to_byte_range, GradientField};
use crate::image::{clamp_index, GrayImage};
use crate::parallel::{band_reduce, fill_rows_logged, BandLog, WorkerConfig};

/// Gradient magnitude after thinning: each entry is either the input
/// magnitude or zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinnedField {
    width: usize,
    height: usize,
    magnitude: Vec<f64>,
}

impl ThinnedField {
    /// Panics if the buffer length does not match the dimensions or a value
    /// is negative or non-finite.
    pub fn new(width: usize, height: usize, magnitude: Vec<f64>) -> Self {
        assert_eq!(magnitude.len(), width * height);
        assert!(magnitude.iter().all(|m| m.is_finite() && *m >= 0.0));
        Self {
            width,
            height,
            magnitude,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn magnitude(&self) -> &[f64] {
        &self.magnitude
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitude.iter().copied().fold(0.0, f64::max)
    }

    /// Parallel maximum; identical to [`Self::max_magnitude`] for any config.
    pub fn max_magnitude_par(&self, cfg: &WorkerConfig) -> f64 {
        band_reduce(
            self.height,
            cfg,
            |rows| {
                self.magnitude[rows.start * self.width..rows.end * self.width]
                    .iter()
                    .copied()
                    .fold(0.0, f64::max)
            },
            f64::max,
        )
        .unwrap_or(0.0)
    }

    pub fn to_image(&self) -> GrayImage {
        rescale_to_byte_range(self.width, self.height, &self.magnitude)
    }
}

/// Keeps a pixel iff its magnitude is `>=` both neighbors along its
/// orientation (replicate borders); everything else becomes zero.
pub fn non_max_suppress(grad: &GradientField, cfg: &WorkerConfig) -> ThinnedField {
    non_max_suppress_logged(grad, cfg, None)
}

pub(crate) fn non_max_suppress_logged(
    grad: &GradientField,
    cfg: &WorkerConfig,
    log: Option<&BandLog>,
) -> ThinnedField {
    let (w, h) = (grad.width(), grad.height());
    let mag = grad.magnitude();
    let orient = grad.orientation();
    let at = |x: isize, y: isize| mag[clamp_index(y, h) * w + clamp_index(x, w)];

    let mut out = vec![0.0; w * h];
    fill_rows_logged(&mut out, w, cfg, log, |y, row| {
        let base = y * w;
        for (x, o) in row.iter_mut().enumerate() {
            let m = mag[base + x];
            if m == 0.0 {
                continue;
            }
            let (dx, dy) = orient[base + x].step();
            let (xi, yi) = (x as isize, y as isize);
            let fwd = at(xi + dx, yi + dy);
            let back = at(xi - dx, yi - dy);
            if m >= fwd && m >= back {
                *o = m;
            }
        }
    });
    ThinnedField {
        width: w,
        height: h,
        magnitude: out,
    }
}
