//! Scalar double-loop references shared by the integration tests.
//!
//! Each one is written from the definition, without the library's band
//! skeletons or helper routines, so agreement is meaningful.

#![allow(dead_code)]

use std::f64::consts::PI;

use edgeforge::{EdgeLabel, GrayImage, Orientation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn clamp(i: isize, len: usize) -> usize {
    i.max(0).min(len as isize - 1) as usize
}

fn px(img: &GrayImage, x: isize, y: isize) -> f64 {
    img.get(clamp(x, img.width()), clamp(y, img.height()))
}

/// Random image of at most `max × max` pixels with integer intensities.
pub fn random_int_image(rng: &mut ChaCha8Rng, max: usize) -> GrayImage {
    let w = rng.random_range(1..=max);
    let h = rng.random_range(1..=max);
    // Mix of full-range noise and a few-level image so plateaus and ties occur.
    let levels: u32 = if rng.random_bool(0.5) {
        256
    } else {
        rng.random_range(2..=4)
    };
    let pixels = (0..w * h)
        .map(|_| (rng.random_range(0..levels) * (255 / (levels - 1).max(1))) as f64)
        .collect();
    GrayImage::new(w, h, pixels).unwrap()
}

pub fn random_float_image(rng: &mut ChaCha8Rng, max: usize) -> GrayImage {
    let w = rng.random_range(1..=max);
    let h = rng.random_range(1..=max);
    let pixels = (0..w * h).map(|_| rng.random_range(0.0..255.0)).collect();
    GrayImage::new(w, h, pixels).unwrap()
}

/// Normalized Gaussian weights on `[-ceil(3σ), ceil(3σ)]`.
pub fn gaussian_weights(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as i64;
    let raw: Vec<f64> = (-r..=r)
        .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|v| v / sum).collect()
}

/// Direct 2-D convolution with the outer-product kernel.
pub fn blur_2d(img: &GrayImage, weights: &[f64]) -> Vec<f64> {
    let r = (weights.len() / 2) as isize;
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (j, wy) in weights.iter().enumerate() {
                for (i, wx) in weights.iter().enumerate() {
                    let sx = x as isize + i as isize - r;
                    let sy = y as isize + j as isize - r;
                    acc += wy * wx * px(img, sx, sy);
                }
            }
            out[y * w + x] = acc;
        }
    }
    out
}

pub struct SobelRef {
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
    pub magnitude: Vec<f64>,
    pub orientation: Vec<Orientation>,
}

/// Correlation with the textbook masks:
///
/// ```text
///   gx: -1 0 1      gy: -1 -2 -1
///       -2 0 2           0  0  0
///       -1 0 1           1  2  1
/// ```
pub fn sobel(img: &GrayImage) -> SobelRef {
    const KX: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
    const KY: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];
    let (w, h) = (img.width(), img.height());
    let mut r = SobelRef {
        gx: vec![0.0; w * h],
        gy: vec![0.0; w * h],
        magnitude: vec![0.0; w * h],
        orientation: vec![Orientation::Deg0; w * h],
    };
    for y in 0..h {
        for x in 0..w {
            let (mut gx, mut gy) = (0.0, 0.0);
            for (dy, (krow_x, krow_y)) in KX.iter().zip(&KY).enumerate() {
                for dx in 0..3 {
                    let v = px(
                        img,
                        x as isize + dx as isize - 1,
                        y as isize + dy as isize - 1,
                    );
                    gx += krow_x[dx] * v;
                    gy += krow_y[dx] * v;
                }
            }
            let i = y * w + x;
            r.gx[i] = gx;
            r.gy[i] = gy;
            r.magnitude[i] = (gx * gx + gy * gy).sqrt();
            r.orientation[i] = sector(gx, gy);
        }
    }
    r
}

/// Direction bin from slope comparisons against tan(22.5°) instead of an
/// angle. Agrees with the angle rule away from exact sector boundaries,
/// which integer gradients never hit (tan 22.5° is irrational).
pub fn sector(gx: f64, gy: f64) -> Orientation {
    let t = (PI / 8.0).tan();
    // Fold the direction into the upper half plane.
    let (gx, gy) = if gy < 0.0 { (-gx, -gy) } else { (gx, gy) };
    if gy == 0.0 {
        return Orientation::Deg0;
    }
    if gx > 0.0 {
        if gy < t * gx {
            Orientation::Deg0
        } else if gy * t < gx {
            Orientation::Deg45
        } else {
            Orientation::Deg90
        }
    } else if gy * t <= -gx {
        if gy < t * -gx {
            Orientation::Deg0
        } else {
            Orientation::Deg135
        }
    } else {
        Orientation::Deg90
    }
}

/// Bin for an integer angle in degrees, straight from the sector table.
pub fn sector_of_degrees(deg: i32) -> Orientation {
    let folded = deg.rem_euclid(180) as f64;
    match folded {
        d if d < 22.5 => Orientation::Deg0,
        d if d < 67.5 => Orientation::Deg45,
        d if d < 112.5 => Orientation::Deg90,
        d if d < 157.5 => Orientation::Deg135,
        _ => Orientation::Deg0,
    }
}

fn offset(o: Orientation) -> (isize, isize) {
    match o {
        Orientation::Deg0 => (1, 0),
        Orientation::Deg45 => (1, 1),
        Orientation::Deg90 => (0, 1),
        Orientation::Deg135 => (-1, 1),
    }
}

/// Keep a pixel iff it is ≥ both neighbors along its direction (borders
/// replicate).
pub fn nms(w: usize, h: usize, mag: &[f64], orient: &[Orientation]) -> Vec<f64> {
    let at = |x: isize, y: isize| mag[clamp(y, h) * w + clamp(x, w)];
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let (dx, dy) = offset(orient[i]);
            let (xi, yi) = (x as isize, y as isize);
            let m = mag[i];
            if m >= at(xi + dx, yi + dy) && m >= at(xi - dx, yi - dy) {
                out[i] = m;
            }
        }
    }
    out
}

pub fn threshold(mag: &[f64], low: f64, high: f64) -> Vec<EdgeLabel> {
    mag.iter()
        .map(|&m| {
            if m >= high {
                EdgeLabel::Strong
            } else if m >= low {
                EdgeLabel::Weak
            } else {
                EdgeLabel::None
            }
        })
        .collect()
}

/// Labels every 8-connected component of non-`None` pixels with a
/// depth-first search and keeps the components containing a `Strong` pixel.
pub fn trace(w: usize, h: usize, labels: &[EdgeLabel]) -> Vec<bool> {
    let mut comp = vec![usize::MAX; w * h];
    let mut has_strong = Vec::new();
    for start in 0..w * h {
        if labels[start] == EdgeLabel::None || comp[start] != usize::MAX {
            continue;
        }
        let id = has_strong.len();
        has_strong.push(false);
        let mut stack = vec![start];
        comp[start] = id;
        while let Some(i) = stack.pop() {
            has_strong[id] |= labels[i] == EdgeLabel::Strong;
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if labels[j] != EdgeLabel::None && comp[j] == usize::MAX {
                        comp[j] = id;
                        stack.push(j);
                    }
                }
            }
        }
    }
    comp.iter()
        .map(|&c| c != usize::MAX && has_strong[c])
        .collect()
}

/// Random label map with clustered Weak regions so components span bands.
pub fn random_labels(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Vec<EdgeLabel> {
    let weak = rng.random_range(0.2..0.7);
    let strong = rng.random_range(0.0..0.05);
    (0..w * h)
        .map(|_| {
            let u: f64 = rng.random();
            if u < strong {
                EdgeLabel::Strong
            } else if u < strong + weak {
                EdgeLabel::Weak
            } else {
                EdgeLabel::None
            }
        })
        .collect()
}
