//! Sobel gradients, orientation quantization, and the 5-point Laplacian.

use serde::{Deserialize, Serialize};

use crate::image::{clamp_index, GrayImage};
use crate::parallel::{fill_rows_logged, BandLog, WorkerConfig};

/// Gradient direction folded into `[0°, 180°)` and snapped to 45° bins.
///
/// Angles are measured in pixel coordinates: `x` grows to the right and `y`
/// grows downward (row index), so `Deg45` points toward `(+x, +y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Deg0,
    Deg45,
    Deg90,
    Deg135,
}

impl Orientation {
    pub const ALL: [Orientation; 4] = [
        Orientation::Deg0,
        Orientation::Deg45,
        Orientation::Deg90,
        Orientation::Deg135,
    ];

    pub fn degrees(self) -> u32 {
        match self {
            Orientation::Deg0 => 0,
            Orientation::Deg45 => 45,
            Orientation::Deg90 => 90,
            Orientation::Deg135 => 135,
        }
    }

    /// Unit pixel step along the gradient direction. Its negation is the
    /// opposite neighbor.
    pub fn step(self) -> (isize, isize) {
        match self {
            Orientation::Deg0 => (1, 0),
            Orientation::Deg45 => (1, 1),
            Orientation::Deg90 => (0, 1),
            Orientation::Deg135 => (-1, 1),
        }
    }
}

/// Snaps `atan2(gy, gx)` to the nearest of 0°, 45°, 90°, 135°.
///
/// Ties at `22.5° + k·45°` go to the larger bin (157.5° wraps to 0°), and
/// `(0, 0)` maps to 0°.
pub fn quantize_orientation(gx: f64, gy: f64) -> Orientation {
    let mut deg = gy.atan2(gx).to_degrees();
    if deg < 0.0 {
        deg += 180.0;
    }
    if deg >= 180.0 {
        deg -= 180.0;
    }
    match ((deg + 22.5) / 45.0).floor() as u32 % 4 {
        0 => Orientation::Deg0,
        1 => Orientation::Deg45,
        2 => Orientation::Deg90,
        _ => Orientation::Deg135,
    }
}

/// Per-pixel Sobel responses with Euclidean magnitude and binned direction.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    width: usize,
    height: usize,
    gx: Vec<f64>,
    gy: Vec<f64>,
    magnitude: Vec<f64>,
    orientation: Vec<Orientation>,
}

impl GradientField {
    /// Builds a field from raw responses, deriving magnitude and orientation.
    pub fn from_components(width: usize, height: usize, gx: Vec<f64>, gy: Vec<f64>) -> Self {
        assert_eq!(gx.len(), width * height);
        assert_eq!(gy.len(), width * height);
        let magnitude = gx
            .iter()
            .zip(&gy)
            .map(|(x, y)| (x * x + y * y).sqrt())
            .collect();
        let orientation = gx
            .iter()
            .zip(&gy)
            .map(|(x, y)| quantize_orientation(*x, *y))
            .collect();
        Self {
            width,
            height,
            gx,
            gy,
            magnitude,
            orientation,
        }
    }

    /// A field with arbitrary magnitudes and orientations. Used to drive
    /// non-maximum suppression directly; `gx`/`gy` are left at zero.
    pub fn from_magnitude(
        width: usize,
        height: usize,
        magnitude: Vec<f64>,
        orientation: Vec<Orientation>,
    ) -> Self {
        assert_eq!(magnitude.len(), width * height);
        assert_eq!(orientation.len(), width * height);
        Self {
            width,
            height,
            gx: vec![0.0; width * height],
            gy: vec![0.0; width * height],
            magnitude,
            orientation,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn gx(&self) -> &[f64] {
        &self.gx
    }

    pub fn gy(&self) -> &[f64] {
        &self.gy
    }

    pub fn magnitude(&self) -> &[f64] {
        &self.magnitude
    }

    pub fn orientation(&self) -> &[Orientation] {
        &self.orientation
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitude.iter().copied().fold(0.0, f64::max)
    }

    /// Magnitude as an image, linearly rescaled so the maximum maps to 255.
    pub fn magnitude_image(&self) -> GrayImage {
        rescale_to_byte_range(self.width, self.height, &self.magnitude)
    }
}

pub(crate) fn rescale_to_byte_range(width: usize, height: usize, values: &[f64]) -> GrayImage {
    let max = values.iter().copied().fold(0.0, f64::max);
    let scale = if max > 0.0 { 255.0 / max } else { 0.0 };
    GrayImage::from_parts(width, height, values.iter().map(|v| v * scale).collect())
}

#[derive(Clone, Copy, Default)]
struct SobelPixel {
    gx: f64,
    gy: f64,
    magnitude: f64,
    orientation: Option<Orientation>,
}

/// Sobel gradient with the unnormalized 3×3 masks
/// `Kx = [[-1,0,1],[-2,0,2],[-1,0,1]]`, `Ky = Kxᵀ`, applied as a correlation
/// with replicate borders.
pub fn sobel(img: &GrayImage, cfg: &WorkerConfig) -> GradientField {
    sobel_logged(img, cfg, None)
}

pub(crate) fn sobel_logged(
    img: &GrayImage,
    cfg: &WorkerConfig,
    log: Option<&BandLog>,
) -> GradientField {
    let (w, h) = (img.width(), img.height());
    let mut out = vec![SobelPixel::default(); w * h];
    fill_rows_logged(&mut out, w, cfg, log, |y, row| {
        let up = img.row(clamp_index(y as isize - 1, h));
        let mid = img.row(y);
        let down = img.row(clamp_index(y as isize + 1, h));
        for (x, px) in row.iter_mut().enumerate() {
            let l = clamp_index(x as isize - 1, w);
            let r = clamp_index(x as isize + 1, w);
            let gx = (up[r] - up[l]) + 2.0 * (mid[r] - mid[l]) + (down[r] - down[l]);
            let gy = (down[l] - up[l]) + 2.0 * (down[x] - up[x]) + (down[r] - up[r]);
            *px = SobelPixel {
                gx,
                gy,
                magnitude: (gx * gx + gy * gy).sqrt(),
                orientation: Some(quantize_orientation(gx, gy)),
            };
        }
    });

    let mut gx = Vec::with_capacity(w * h);
    let mut gy = Vec::with_capacity(w * h);
    let mut magnitude = Vec::with_capacity(w * h);
    let mut orientation = Vec::with_capacity(w * h);
    for p in out {
        gx.push(p.gx);
        gy.push(p.gy);
        magnitude.push(p.magnitude);
        orientation.push(p.orientation.expect("filled"));
    }
    GradientField {
        width: w,
        height: h,
        gx,
        gy,
        magnitude,
        orientation,
    }
}

/// Discrete Laplacian, `f(x±1,y) + f(x,y±1) − 4 f(x,y)`, replicate borders.
pub fn laplacian(img: &GrayImage, cfg: &WorkerConfig) -> GrayImage {
    laplacian_logged(img, cfg, None)
}

pub(crate) fn laplacian_logged(
    img: &GrayImage,
    cfg: &WorkerConfig,
    log: Option<&BandLog>,
) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0.0; w * h];
    fill_rows_logged(&mut out, w, cfg, log, |y, row| {
        let up = img.row(clamp_index(y as isize - 1, h));
        let mid = img.row(y);
        let down = img.row(clamp_index(y as isize + 1, h));
        for (x, o) in row.iter_mut().enumerate() {
            let l = clamp_index(x as isize - 1, w);
            let r = clamp_index(x as isize + 1, w);
            *o = mid[r] + mid[l] + down[x] + up[x] - 4.0 * mid[x];
        }
    });
    GrayImage::from_parts(w, h, out)
}
