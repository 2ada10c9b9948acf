//! Double thresholding and 8-connected edge tracing.
//!
//! [`trace_edges`] is the serial breadth-first flood used by the default
//! pipeline. [`trace_edges_parallel`] produces the same edge set by labeling
//! each row band independently with a union-find and then merging labels
//! across band boundaries in a serial pass.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::nms::ThinnedField;
use crate::parallel::{fill_bands, fill_rows, WorkerConfig};

/// Ratio of the strongest thinned magnitude used as the high threshold by
/// [`Thresholds::auto`].
pub const AUTO_HIGH_RATIO: f64 = 0.2;
/// Ratio of the high threshold used as the low threshold by [`Thresholds::auto`].
pub const AUTO_LOW_RATIO: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    low: f64,
    high: f64,
}

impl Thresholds {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite()) || low < 0.0 || low > high {
            return Err(Error::InvalidThresholds { low, high });
        }
        Ok(Self { low, high })
    }

    /// `high = 0.2 * max_magnitude`, `low = 0.4 * high`.
    pub fn auto(max_magnitude: f64) -> Self {
        let high = AUTO_HIGH_RATIO * max_magnitude.max(0.0);
        Self {
            low: AUTO_LOW_RATIO * high,
            high,
        }
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.high
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum EdgeLabel {
    #[default]
    None,
    Weak,
    Strong,
}

/// Threshold labels plus the traced binary edge map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMap {
    width: usize,
    height: usize,
    labels: Vec<EdgeLabel>,
    edges: Vec<bool>,
    traced: bool,
}

impl EdgeMap {
    /// An untraced map from explicit labels.
    pub fn from_labels(width: usize, height: usize, labels: Vec<EdgeLabel>) -> Self {
        assert_eq!(labels.len(), width * height);
        Self {
            width,
            height,
            edges: vec![false; labels.len()],
            labels,
            traced: false,
        }
    }

    /// Traced map with no edges at all.
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            traced: true,
            ..Self::from_labels(width, height, vec![EdgeLabel::None; width * height])
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[EdgeLabel] {
        &self.labels
    }

    /// Final edge flags; all `false` until traced.
    pub fn edges(&self) -> &[bool] {
        &self.edges
    }

    pub fn is_traced(&self) -> bool {
        self.traced
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().filter(|&&e| e).count()
    }

    /// Edges as 255, background as 0.
    pub fn to_image(&self) -> GrayImage {
        GrayImage::from_parts(
            self.width,
            self.height,
            self.edges
                .iter()
                .map(|&e| if e { 255.0 } else { 0.0 })
                .collect(),
        )
    }

    fn with_edges(mut self, edges: Vec<bool>) -> Self {
        debug_assert_eq!(edges.len(), self.labels.len());
        self.edges = edges;
        self.traced = true;
        self
    }
}

/// `Strong` if `>= high`, `Weak` if `>= low`, otherwise `None`.
pub fn double_threshold(thin: &ThinnedField, t: &Thresholds) -> EdgeMap {
    let labels = thin.magnitude().iter().map(|&m| classify(m, t)).collect();
    EdgeMap::from_labels(thin.width(), thin.height(), labels)
}

/// Row-parallel [`double_threshold`].
pub fn double_threshold_par(thin: &ThinnedField, t: &Thresholds, cfg: &WorkerConfig) -> EdgeMap {
    let w = thin.width();
    let mag = thin.magnitude();
    let mut labels = vec![EdgeLabel::None; mag.len()];
    fill_rows(&mut labels, w, cfg, |y, row| {
        for (l, &m) in row.iter_mut().zip(&mag[y * w..(y + 1) * w]) {
            *l = classify(m, t);
        }
    });
    EdgeMap::from_labels(thin.width(), thin.height(), labels)
}

#[inline]
fn classify(m: f64, t: &Thresholds) -> EdgeLabel {
    if m >= t.high {
        EdgeLabel::Strong
    } else if m >= t.low {
        EdgeLabel::Weak
    } else {
        EdgeLabel::None
    }
}

fn neighbors8(x: usize, y: usize, w: usize, h: usize) -> impl Iterator<Item = (usize, usize)> {
    let xs = x.saturating_sub(1)..=(x + 1).min(w - 1);
    let ys = y.saturating_sub(1)..=(y + 1).min(h - 1);
    ys.flat_map(move |ny| xs.clone().map(move |nx| (nx, ny)))
        .filter(move |&p| p != (x, y))
}

/// Breadth-first flood from every `Strong` pixel through 8-connected
/// `Weak`/`Strong` pixels. Single-threaded.
pub fn trace_edges(map: &EdgeMap) -> EdgeMap {
    let (w, h) = (map.width, map.height);
    let labels = &map.labels;
    let mut edges = vec![false; labels.len()];
    let mut queue = VecDeque::new();
    for (i, l) in labels.iter().enumerate() {
        if *l == EdgeLabel::Strong {
            edges[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        for (nx, ny) in neighbors8(i % w, i / w, w, h) {
            let j = ny * w + nx;
            if !edges[j] && labels[j] != EdgeLabel::None {
                edges[j] = true;
                queue.push_back(j);
            }
        }
    }
    map.clone().with_edges(edges)
}

#[derive(Debug, Clone, Copy)]
struct Node {
    parent: u32,
    strong: bool,
}

const NO_PARENT: u32 = u32::MAX;

/// Root lookup with path halving, on a slab whose global indices start at `base`.
fn find_local(nodes: &mut [Node], base: usize, mut i: usize) -> usize {
    loop {
        let p = nodes[i - base].parent as usize;
        if p == i {
            return i;
        }
        let gp = nodes[p - base].parent;
        nodes[i - base].parent = gp;
        i = gp as usize;
    }
}

/// Links the larger root under the smaller one and carries the strong flag.
fn union_local(nodes: &mut [Node], base: usize, a: usize, b: usize) {
    let ra = find_local(nodes, base, a);
    let rb = find_local(nodes, base, b);
    if ra == rb {
        return;
    }
    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
    nodes[hi - base].parent = lo as u32;
    let strong = nodes[hi - base].strong;
    nodes[lo - base].strong |= strong;
}

fn find_readonly(nodes: &[Node], mut i: usize) -> usize {
    loop {
        let p = nodes[i].parent as usize;
        if p == i {
            return i;
        }
        i = p;
    }
}

/// Same edge set as [`trace_edges`], computed band-parallel.
///
/// Each band labels its own Weak/Strong components with a union-find, then a
/// serial pass unions components that touch across band boundaries, and a
/// final parallel pass keeps every pixel whose component contains a Strong
/// pixel.
pub fn trace_edges_parallel(map: &EdgeMap, cfg: &WorkerConfig) -> EdgeMap {
    let (w, h) = (map.width, map.height);
    let labels = &map.labels;
    assert!(
        labels.len() < NO_PARENT as usize,
        "image too large for 32-bit labels"
    );

    let mut nodes = vec![
        Node {
            parent: NO_PARENT,
            strong: false,
        };
        labels.len()
    ];

    fill_bands(&mut nodes, w, cfg, |rows, slab| {
        let base = rows.start * w;
        for y in rows.clone() {
            for x in 0..w {
                let i = y * w + x;
                let label = labels[i];
                if label == EdgeLabel::None {
                    continue;
                }
                slab[i - base] = Node {
                    parent: i as u32,
                    strong: label == EdgeLabel::Strong,
                };
                if x > 0 && labels[i - 1] != EdgeLabel::None {
                    union_local(slab, base, i, i - 1);
                }
                if y > rows.start {
                    for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                        let j = (y - 1) * w + nx;
                        if labels[j] != EdgeLabel::None {
                            union_local(slab, base, i, j);
                        }
                    }
                }
            }
        }
        // Parents always point at smaller indices, so one forward sweep flattens.
        for i in base..base + slab.len() {
            let p = slab[i - base].parent;
            if p != NO_PARENT && p as usize != i {
                slab[i - base].parent = slab[p as usize - base].parent;
            }
        }
    });

    // Boundary merge. Band starts come from the same plan `fill_bands` used.
    for band in crate::parallel::plan_bands(h, cfg).iter().skip(1) {
        let y = band.start;
        for x in 0..w {
            let i = y * w + x;
            if labels[i] == EdgeLabel::None {
                continue;
            }
            for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                let j = (y - 1) * w + nx;
                if labels[j] != EdgeLabel::None {
                    union_local(&mut nodes, 0, i, j);
                }
            }
        }
    }

    let nodes = &nodes;
    let mut edges = vec![false; labels.len()];
    fill_rows(&mut edges, w, cfg, |y, row| {
        for (x, e) in row.iter_mut().enumerate() {
            let i = y * w + x;
            *e = labels[i] != EdgeLabel::None && nodes[find_readonly(nodes, i)].strong;
        }
    });
    map.clone().with_edges(edges)
}
