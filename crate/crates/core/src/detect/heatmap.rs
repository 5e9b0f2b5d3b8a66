//! Keypoint heatmaps and center/offset/size decoding.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::detect::bbox::BBox;
use crate::detect::Detection;
use crate::error::{Error, Result};

/// The head outputs of a keypoint detector on one frame, on a grid
/// downsampled by `down_ratio` from the `input_width x input_height` frame:
/// per-class center scores, per-cell box sizes in input pixels, and per-cell
/// sub-cell center offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapSet {
    grid_w: usize,
    grid_h: usize,
    classes: usize,
    down_ratio: usize,
    /// `classes` planes of `grid_h x grid_w` scores in `[0, 1]`.
    center: Vec<f64>,
    /// Two planes: box width then box height, in input pixels.
    size: Vec<f64>,
    /// Two planes: x then y offset, in cells, each in `[0, 1)`.
    offset: Vec<f64>,
}

impl HeatmapSet {
    pub fn new(
        grid_w: usize,
        grid_h: usize,
        classes: usize,
        down_ratio: usize,
        center: Vec<f64>,
        size: Vec<f64>,
        offset: Vec<f64>,
    ) -> Result<Self> {
        if grid_w == 0 || grid_h == 0 || classes == 0 || down_ratio == 0 {
            return Err(Error::invalid(format!(
                "heatmap grid must be nonzero, got {grid_w}x{grid_h}, {classes} classes, ratio {down_ratio}"
            )));
        }
        let cells = grid_w * grid_h;
        if center.len() != cells * classes {
            return Err(Error::invalid(format!(
                "center tensor holds {} values, expected {}",
                center.len(),
                cells * classes
            )));
        }
        if size.len() != cells * 2 || offset.len() != cells * 2 {
            return Err(Error::invalid(format!(
                "size/offset tensors hold {}/{} values, expected {} each",
                size.len(),
                offset.len(),
                cells * 2
            )));
        }
        if let Some(bad) = center.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0) {
            return Err(Error::invalid(format!("center score {bad} outside [0, 1]")));
        }
        if let Some(bad) = size.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::invalid(format!("box size {bad} is negative or non-finite")));
        }
        if let Some(bad) = offset.iter().find(|v| !v.is_finite() || **v < 0.0 || **v >= 1.0) {
            return Err(Error::invalid(format!("offset {bad} outside [0, 1)")));
        }
        Ok(HeatmapSet {
            grid_w,
            grid_h,
            classes,
            down_ratio,
            center,
            size,
            offset,
        })
    }

    /// All-zero heatmaps for a grid (builder for synthesis).
    pub fn zeros(grid_w: usize, grid_h: usize, classes: usize, down_ratio: usize) -> Result<Self> {
        let cells = grid_w * grid_h;
        HeatmapSet::new(
            grid_w,
            grid_h,
            classes,
            down_ratio,
            vec![0.0; cells * classes],
            vec![0.0; cells * 2],
            vec![0.0; cells * 2],
        )
    }

    pub fn grid_w(&self) -> usize {
        self.grid_w
    }

    pub fn grid_h(&self) -> usize {
        self.grid_h
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn down_ratio(&self) -> usize {
        self.down_ratio
    }

    /// Input frame width `W = grid_w * R`.
    pub fn input_width(&self) -> usize {
        self.grid_w * self.down_ratio
    }

    /// Input frame height `H = grid_h * R`.
    pub fn input_height(&self) -> usize {
        self.grid_h * self.down_ratio
    }

    #[inline]
    fn cell(&self, i: usize, j: usize) -> usize {
        j * self.grid_w + i
    }

    /// Center score for class `c` at cell `(i, j)` (`i` = column, `j` = row).
    pub fn center_at(&self, c: usize, i: usize, j: usize) -> f64 {
        self.center[c * self.grid_w * self.grid_h + self.cell(i, j)]
    }

    /// `(width, height)` regression at cell `(i, j)`, in input pixels.
    pub fn size_at(&self, i: usize, j: usize) -> (f64, f64) {
        let cells = self.grid_w * self.grid_h;
        (self.size[self.cell(i, j)], self.size[cells + self.cell(i, j)])
    }

    /// `(dx, dy)` sub-cell offset at cell `(i, j)`.
    pub fn offset_at(&self, i: usize, j: usize) -> (f64, f64) {
        let cells = self.grid_w * self.grid_h;
        (self.offset[self.cell(i, j)], self.offset[cells + self.cell(i, j)])
    }

    /// Writes a center score (synthesis helper). Panics on bad indices or a
    /// score outside `[0, 1]`.
    pub fn set_center(&mut self, c: usize, i: usize, j: usize, v: f64) {
        assert!(c < self.classes && i < self.grid_w && j < self.grid_h);
        assert!((0.0..=1.0).contains(&v), "center score {v} outside [0, 1]");
        let cell = self.cell(i, j);
        self.center[c * self.grid_w * self.grid_h + cell] = v;
    }

    /// Writes size and offset regressions at a cell (synthesis helper).
    pub fn set_regression(&mut self, i: usize, j: usize, size: (f64, f64), offset: (f64, f64)) {
        assert!(i < self.grid_w && j < self.grid_h);
        assert!(size.0 >= 0.0 && size.1 >= 0.0, "sizes must be non-negative");
        assert!((0.0..1.0).contains(&offset.0) && (0.0..1.0).contains(&offset.1));
        let cells = self.grid_w * self.grid_h;
        let cell = self.cell(i, j);
        self.size[cell] = size.0;
        self.size[cells + cell] = size.1;
        self.offset[cell] = offset.0;
        self.offset[cells + cell] = offset.1;
    }

    /// True when cell `(i, j)` is the peak of its 3x3 neighbourhood for
    /// class `c`: strictly greater than every neighbour, with plateau ties
    /// resolved in favour of the first cell in row-major scan order.
    fn is_peak(&self, c: usize, i: usize, j: usize) -> bool {
        let v = self.center_at(c, i, j);
        for dj in -1i64..=1 {
            for di in -1i64..=1 {
                if di == 0 && dj == 0 {
                    continue;
                }
                let ni = i as i64 + di;
                let nj = j as i64 + dj;
                if ni < 0 || nj < 0 || ni >= self.grid_w as i64 || nj >= self.grid_h as i64 {
                    continue;
                }
                let nv = self.center_at(c, ni as usize, nj as usize);
                if nv > v {
                    return false;
                }
                // Equal neighbour earlier in scan order owns the plateau.
                if nv == v && (nj, ni) < (j as i64, i as i64) {
                    return false;
                }
            }
        }
        true
    }
}

/// Decode settings; defaults follow the pipeline configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeConfig {
    /// Minimum center score for a peak to be kept.
    pub score_floor: f64,
    /// Maximum peaks kept per class, by descending score.
    pub max_per_class: usize,
    /// When set, detections carry the full per-class score column at their
    /// peak cell instead of a one-hot vector.
    pub dense_scores: bool,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            score_floor: 0.05,
            max_per_class: 20,
            dense_scores: false,
        }
    }
}

/// Extracts detections from one frame's heatmaps.
///
/// Peaks are cells at least `score_floor` that win their 3x3 neighbourhood;
/// a peak at cell `(i, j)` becomes a box centered at
/// `((i + dx) * R, (j + dy) * R)` with the regressed size, clamped to the
/// input frame. Per class, the `max_per_class` highest peaks are kept (score
/// ties: scan order). Output is grouped by class, descending score within a
/// class.
pub fn decode_heatmaps(h: &HeatmapSet, frame: u64, cfg: &DecodeConfig) -> Vec<Detection> {
    let r = h.down_ratio() as f64;
    let w_max = h.input_width() as f64;
    let h_max = h.input_height() as f64;
    let mut out = Vec::new();
    for c in 0..h.classes() {
        let mut peaks: Vec<(f64, usize, usize)> = Vec::new();
        for j in 0..h.grid_h() {
            for i in 0..h.grid_w() {
                let v = h.center_at(c, i, j);
                if v >= cfg.score_floor && h.is_peak(c, i, j) {
                    peaks.push((v, i, j));
                }
            }
        }
        // Stable sort keeps scan order among equal scores.
        peaks.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("scores are finite"));
        peaks.truncate(cfg.max_per_class);
        for (v, i, j) in peaks {
            let (dx, dy) = h.offset_at(i, j);
            let (bw, bh) = h.size_at(i, j);
            let cx = (i as f64 + dx) * r;
            let cy = (j as f64 + dy) * r;
            let bbox = BBox {
                x1: (cx - bw / 2.0).clamp(0.0, w_max),
                y1: (cy - bh / 2.0).clamp(0.0, h_max),
                x2: (cx + bw / 2.0).clamp(0.0, w_max),
                y2: (cy + bh / 2.0).clamp(0.0, h_max),
            };
            let scores = if cfg.dense_scores {
                (0..h.classes()).map(|cc| h.center_at(cc, i, j)).collect()
            } else {
                let mut s = vec![0.0; h.classes()];
                s[c] = v;
                s
            };
            out.push(Detection::new(frame, bbox, scores));
        }
    }
    out
}

const HEADER_LEN: usize = 24;

/// Writes one frame's heatmaps: a six-field `u32` little-endian header
/// (`grid_w`, `grid_h`, `classes`, `down_ratio`, `input_w`, `input_h`)
/// followed by the center, size, and offset tensors as little-endian `f32`
/// in row-major, channel-last order.
pub fn write_heatmap(path: impl AsRef<Path>, h: &HeatmapSet) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for field in [
        h.grid_w() as u32,
        h.grid_h() as u32,
        h.classes() as u32,
        h.down_ratio() as u32,
        h.input_width() as u32,
        h.input_height() as u32,
    ] {
        w.write_all(&field.to_le_bytes()).map_err(|e| Error::io(path, e))?;
    }
    let mut write_channel_last = |planes: &[f64], channels: usize| -> Result<()> {
        let cells = h.grid_w() * h.grid_h();
        for cell in 0..cells {
            for c in 0..channels {
                let v = planes[c * cells + cell] as f32;
                w.write_all(&v.to_le_bytes()).map_err(|e| Error::io(path, e))?;
            }
        }
        Ok(())
    };
    write_channel_last(&h.center, h.classes)?;
    write_channel_last(&h.size, 2)?;
    write_channel_last(&h.offset, 2)?;
    Ok(())
}

/// Reads a heatmap file written by [`write_heatmap`].
pub fn read_heatmap(path: impl AsRef<Path>) -> Result<HeatmapSet> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut header = [0u8; HEADER_LEN];
    reader
        .read_exact(&mut header)
        .map_err(|_| Error::corrupt(path, "missing heatmap header"))?;
    let field = |k: usize| u32::from_le_bytes(header[k * 4..k * 4 + 4].try_into().unwrap()) as usize;
    let (grid_w, grid_h, classes, down_ratio) = (field(0), field(1), field(2), field(3));
    let (input_w, input_h) = (field(4), field(5));
    if grid_w == 0 || grid_h == 0 || classes == 0 || down_ratio == 0 {
        return Err(Error::corrupt(path, "zero grid dimension in header"));
    }
    if grid_w * down_ratio != input_w || grid_h * down_ratio != input_h {
        return Err(Error::corrupt(
            path,
            format!(
                "grid {grid_w}x{grid_h} at ratio {down_ratio} does not cover declared input {input_w}x{input_h}"
            ),
        ));
    }
    let cells = grid_w * grid_h;
    let total = cells * (classes + 4);
    let mut body = vec![0u8; total * 4];
    reader
        .read_exact(&mut body)
        .map_err(|_| Error::corrupt(path, "truncated heatmap tensors"))?;
    let mut trailing = [0u8; 1];
    if reader.read(&mut trailing).map_err(|e| Error::io(path, e))? != 0 {
        return Err(Error::corrupt(path, "trailing bytes after heatmap tensors"));
    }
    let values: Vec<f64> = body
        .chunks_exact(4)
        .map(|b| f64::from(f32::from_le_bytes(b.try_into().unwrap())))
        .collect();
    let read_channel_last = |start: usize, channels: usize| -> Vec<f64> {
        let mut planes = vec![0.0; cells * channels];
        for cell in 0..cells {
            for c in 0..channels {
                planes[c * cells + cell] = values[start + cell * channels + c];
            }
        }
        planes
    };
    let center = read_channel_last(0, classes);
    let size = read_channel_last(cells * classes, 2);
    let offset = read_channel_last(cells * (classes + 2), 2);
    HeatmapSet::new(grid_w, grid_h, classes, down_ratio, center, size, offset)
        .map_err(|e| Error::corrupt(path, e.to_string()))
}
