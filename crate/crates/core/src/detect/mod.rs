//! Per-frame detections: boxes, heatmap decoding, NMS, and detection I/O.

mod bbox;
mod heatmap;
pub mod io;
mod nms;

pub use bbox::{iou, BBox};
pub use heatmap::{
    decode_heatmaps, read_heatmap, write_heatmap, DecodeConfig, HeatmapSet,
};
pub use io::{read_detections, write_detections, DetectionStream};
pub use nms::nms;

use serde::{Deserialize, Serialize};

/// One detected box with a per-class score vector, tied to a frame index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub frame: u64,
    pub bbox: BBox,
    /// Class scores in `[0, 1]`; length equals the pipeline's class count.
    pub scores: Vec<f64>,
}

impl Detection {
    pub fn new(frame: u64, bbox: BBox, scores: Vec<f64>) -> Self {
        Detection { frame, bbox, scores }
    }

    /// Score for `class`, or 0 when the vector is shorter.
    pub fn score(&self, class: usize) -> f64 {
        self.scores.get(class).copied().unwrap_or(0.0)
    }

    /// Index of the highest score (ties: lowest index); `None` for an empty
    /// vector.
    pub fn top_class(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &s) in self.scores.iter().enumerate() {
            if best.map_or(true, |(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        best.map(|(i, _)| i)
    }
}
