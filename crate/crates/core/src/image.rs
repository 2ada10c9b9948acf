//! Grayscale image representation and PGM (netpbm P2/P5) I/O.
//!
//! Every stage of the pipeline works on [`GrayImage`]: a row-major buffer of
//! `f64` intensities, nominally in `0.0..=255.0`. Quantization back to 8-bit
//! happens only in [`save_pgm`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, PgmErrorKind, Result};

/// Dense grayscale image, row-major, finite `f64` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

/// Column/row index into an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PixelCoord {
    pub x: usize,
    pub y: usize,
}

impl PixelCoord {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::InvalidImage(format!("dimensions {width}x{height} overflow")))?;
        if pixels.len() != expected {
            return Err(Error::InvalidImage(format!(
                "expected {expected} pixels for {width}x{height}, got {}",
                pixels.len()
            )));
        }
        if let Some(i) = pixels.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidImage(format!(
                "non-finite intensity at ({}, {})",
                i % width,
                i / width
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Wraps a buffer produced by a stage that upholds the invariants itself.
    pub(crate) fn from_parts(width: usize, height: usize, pixels: Vec<f64>) -> Self {
        debug_assert_eq!(pixels.len(), width * height);
        debug_assert!(pixels.iter().all(|v| v.is_finite()));
        Self {
            width,
            height,
            pixels,
        }
    }

    /// Image with every pixel set to `value`.
    ///
    /// Panics if a dimension is zero or `value` is not finite.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self::new(width, height, vec![value; width * height]).expect("valid constant image")
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    ///
    /// Panics if a dimension is zero or `f` yields a non-finite value.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels).expect("valid generated image")
    }

    /// Uniform integer noise in `0..=255` from a fixed seed. Identical on every
    /// platform for a given seed.
    pub fn noise(width: usize, height: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_fn(width, height, |_, _| f64::from(rng.random::<u8>()))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    /// Panics when out of range.
    pub fn get(&self, x: usize, y: usize) -> f64 {
        assert!(x < self.width && y < self.height, "({x}, {y}) out of range");
        self.pixels[y * self.width + x]
    }

    pub fn at(&self, p: PixelCoord) -> Option<f64> {
        (p.x < self.width && p.y < self.height).then(|| self.pixels[p.y * self.width + p.x])
    }

    /// Replicate-border access: out-of-range coordinates are clamped onto the
    /// nearest edge pixel. This is the border policy of every stencil in the crate.
    #[inline]
    pub fn sample_clamped(&self, x: isize, y: isize) -> f64 {
        let cx = clamp_index(x, self.width);
        let cy = clamp_index(y, self.height);
        self.pixels[cy * self.width + cx]
    }

    pub fn transpose(&self) -> Self {
        Self::from_parts(
            self.height,
            self.width,
            transpose_buffer(&self.pixels, self.width, self.height),
        )
    }

    /// Multiplies every intensity by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(
            self.width,
            self.height,
            self.pixels.iter().map(|v| v * factor).collect(),
        )
        .expect("finite scale of finite image")
    }
}

#[inline]
pub(crate) fn clamp_index(i: isize, len: usize) -> usize {
    if i <= 0 {
        0
    } else {
        (i as usize).min(len - 1)
    }
}

pub(crate) fn transpose_buffer<T: Copy>(data: &[T], width: usize, height: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(data.len());
    for x in 0..width {
        for y in 0..height {
            out.push(data[y * width + x]);
        }
    }
    out
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Next unsigned decimal token, or `None` at end of input.
    fn next_uint(&mut self) -> Result<Option<(usize, u32)>> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        if start >= self.bytes.len() {
            return Ok(None);
        }
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
        {
            self.pos += 1;
        }
        let token = &self.bytes[start..self.pos];
        std::str::from_utf8(token)
            .ok()
            .filter(|s| s.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|s| s.parse::<u32>().ok())
            .map(|v| Some((start, v)))
            .ok_or_else(|| Error::pgm(start, PgmErrorKind::BadToken))
    }

    fn header_field(&mut self) -> Result<(usize, u32)> {
        self.next_uint()?
            .ok_or_else(|| Error::pgm(self.bytes.len(), PgmErrorKind::TruncatedHeader))
    }
}

/// Decodes a binary (P5) or ASCII (P2) PGM with maxval at most 255.
///
/// Sample values are taken verbatim (no rescaling to 255), so a pixel stored
/// as `42` decodes to `42.0` regardless of maxval.
pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(Error::pgm(0, PgmErrorKind::BadMagic)),
    };
    let mut reader = HeaderReader { bytes, pos: 2 };
    if !reader
        .bytes
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(Error::pgm(0, PgmErrorKind::BadMagic));
    }

    let (w_off, width) = reader.header_field()?;
    let (_, height) = reader.header_field()?;
    if width == 0 || height == 0 {
        return Err(Error::pgm(w_off, PgmErrorKind::ZeroDimension));
    }
    let (m_off, maxval) = reader.header_field()?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::pgm(m_off, PgmErrorKind::BadMaxval(maxval)));
    }

    let (width, height) = (width as usize, height as usize);
    let expected = width * height;
    let mut pixels = Vec::with_capacity(expected);

    if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        let start = reader.pos + 1;
        let payload = bytes.get(start..).unwrap_or(&[]);
        if payload.len() < expected {
            return Err(Error::pgm(
                bytes.len(),
                PgmErrorKind::TruncatedPayload {
                    expected,
                    found: payload.len(),
                },
            ));
        }
        for (i, &b) in payload[..expected].iter().enumerate() {
            if u32::from(b) > maxval {
                return Err(Error::pgm(
                    start + i,
                    PgmErrorKind::SampleOutOfRange {
                        value: u32::from(b),
                        maxval,
                    },
                ));
            }
            pixels.push(f64::from(b));
        }
    } else {
        while pixels.len() < expected {
            match reader.next_uint()? {
                Some((off, v)) if v > maxval => {
                    return Err(Error::pgm(
                        off,
                        PgmErrorKind::SampleOutOfRange { value: v, maxval },
                    ));
                }
                Some((_, v)) => pixels.push(f64::from(v)),
                None => {
                    return Err(Error::pgm(
                        bytes.len(),
                        PgmErrorKind::TruncatedPayload {
                            expected,
                            found: pixels.len(),
                        },
                    ));
                }
            }
        }
    }

    Ok(GrayImage::from_parts(width, height, pixels))
}

/// Encodes as binary P5 with maxval 255, rounding half away from zero.
///
/// Fails if any pixel would round outside `0..=255`.
pub fn save_pgm(img: &GrayImage) -> Result<Vec<u8>> {
    let header = format!("P5\n{} {}\n255\n", img.width, img.height);
    let mut out = Vec::with_capacity(header.len() + img.pixels.len());
    out.extend_from_slice(header.as_bytes());
    for (i, &v) in img.pixels.iter().enumerate() {
        let rounded = v.round();
        if !(0.0..=255.0).contains(&rounded) {
            return Err(Error::Unrepresentable {
                x: i % img.width,
                y: i / img.width,
                value: v,
            });
        }
        out.push(rounded as u8);
    }
    Ok(out)
}

/// Reads and decodes a PGM file.
pub fn read_pgm_file(path: impl AsRef<std::path::Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    load_pgm(&bytes)
}

/// Encodes and writes a PGM file.
pub fn write_pgm_file(path: impl AsRef<std::path::Path>, img: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    let bytes = save_pgm(img)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
