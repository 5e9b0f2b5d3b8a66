//! Detection and tube evaluation: frame-level AP over boxes and video-level
//! AP over spatio-temporal tubes, aggregated into a small metric report.
//!
//! Ground truth is organized per video; predictions are matched greedily to
//! unmatched ground-truth instances by highest overlap. All sort orders and
//! tie breaks are deterministic so every metric is exactly reproducible.

mod ap;

pub use ap::{frame_ap, map_suite, tube_iou, video_ap, MapReport, PrCurve};

use std::collections::BTreeMap;
use std::path::Path;

use crate::detect::{BBox, Detection};
use crate::error::{Error, Result};
use crate::tubes::{read_tubes, ActionTube, TubeRecord};

/// One annotated tube: a class plus boxes over a strictly increasing frame
/// sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct GtTube {
    pub class: usize,
    pub frames: Vec<(u64, BBox)>,
}

impl GtTube {
    pub fn new(class: usize, frames: Vec<(u64, BBox)>) -> Result<Self> {
        validate_frames(&frames)?;
        Ok(GtTube { class, frames })
    }
}

/// Annotated tubes for a set of videos, keyed by video name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruth {
    videos: BTreeMap<String, Vec<GtTube>>,
    classes: usize,
}

impl GroundTruth {
    pub fn new() -> Self {
        GroundTruth::default()
    }

    pub fn add_tube(&mut self, video: &str, tube: GtTube) {
        self.classes = self.classes.max(tube.class + 1);
        self.videos.entry(video.to_string()).or_default().push(tube);
    }

    /// Builds ground truth from tube records; every record must carry a
    /// `video` tag.
    pub fn from_records(records: &[TubeRecord]) -> Result<Self> {
        let mut gt = GroundTruth::new();
        for rec in records {
            rec.validate()?;
            let video = rec
                .video
                .as_deref()
                .ok_or_else(|| Error::invalid("ground-truth tube is missing its video tag"))?;
            let frames = rec.frames.iter().map(|f| (f.t, f.bbox)).collect();
            gt.add_tube(video, GtTube { class: rec.class, frames });
        }
        Ok(gt)
    }

    /// Number of classes (highest seen class index + 1).
    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn videos(&self) -> &BTreeMap<String, Vec<GtTube>> {
        &self.videos
    }

    /// Ascending class indices with at least one annotated tube.
    pub fn present_classes(&self) -> Vec<usize> {
        let mut present = vec![false; self.classes];
        for tubes in self.videos.values() {
            for tube in tubes {
                present[tube.class] = true;
            }
        }
        present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(c, _)| c)
            .collect()
    }

    /// Converts back to records (for serialization), videos in name order.
    pub fn to_records(&self) -> Vec<TubeRecord> {
        let mut out = Vec::new();
        for (video, tubes) in &self.videos {
            for tube in tubes {
                out.push(TubeRecord {
                    id: None,
                    class: tube.class,
                    score: 1.0,
                    frames: tube
                        .frames
                        .iter()
                        .map(|&(t, bbox)| crate::tubes::TubeFrameRecord {
                            t,
                            bbox,
                            extrapolated: false,
                        })
                        .collect(),
                    video: Some(video.clone()),
                });
            }
        }
        out
    }
}

/// Reads ground truth from a tube JSONL file with `video` tags.
pub fn read_ground_truth<P: AsRef<Path>>(path: P) -> Result<GroundTruth> {
    GroundTruth::from_records(&read_tubes(path)?)
}

/// Frame-level predictions for one video, flattened in input order; each
/// detection carries its own frame index.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoDetections {
    pub video: String,
    pub dets: Vec<Detection>,
}

impl VideoDetections {
    pub fn new(video: impl Into<String>, dets: Vec<Detection>) -> Self {
        VideoDetections { video: video.into(), dets }
    }

    /// Flattens per-frame detection lists (ascending frames) into one video.
    pub fn from_frames<'a, I>(video: impl Into<String>, frames: I) -> Self
    where
        I: IntoIterator<Item = &'a [Detection]>,
    {
        let dets = frames.into_iter().flatten().cloned().collect();
        VideoDetections { video: video.into(), dets }
    }
}

/// A predicted tube reduced to what evaluation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalTube {
    pub class: usize,
    pub score: f64,
    pub frames: Vec<(u64, BBox)>,
}

impl EvalTube {
    pub fn new(class: usize, score: f64, frames: Vec<(u64, BBox)>) -> Result<Self> {
        validate_frames(&frames)?;
        Ok(EvalTube { class, score, frames })
    }

    /// Converts a serialized tube; with `exclude_extrapolated` the
    /// extrapolated frames are dropped, and a tube left with no frames
    /// yields `None`.
    pub fn from_record(rec: &TubeRecord, exclude_extrapolated: bool) -> Option<EvalTube> {
        let frames: Vec<(u64, BBox)> = rec
            .frames
            .iter()
            .filter(|f| !(exclude_extrapolated && f.extrapolated))
            .map(|f| (f.t, f.bbox))
            .collect();
        if frames.is_empty() {
            return None;
        }
        Some(EvalTube {
            class: rec.class,
            score: rec.score,
            frames,
        })
    }
}

impl From<&ActionTube> for EvalTube {
    fn from(tube: &ActionTube) -> Self {
        EvalTube {
            class: tube.class_label,
            score: tube.score,
            frames: tube.frames.iter().map(|f| (f.t, f.bbox)).collect(),
        }
    }
}

/// Predicted tubes for one video.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoTubes {
    pub video: String,
    pub tubes: Vec<EvalTube>,
}

impl VideoTubes {
    pub fn new(video: impl Into<String>, tubes: Vec<EvalTube>) -> Self {
        VideoTubes { video: video.into(), tubes }
    }
}

fn validate_frames(frames: &[(u64, BBox)]) -> Result<()> {
    if frames.is_empty() {
        return Err(Error::invalid("tube has no frames"));
    }
    for pair in frames.windows(2) {
        if pair[1].0 <= pair[0].0 {
            return Err(Error::invalid(format!(
                "tube frames must be strictly increasing: {} followed by {}",
                pair[0].0, pair[1].0
            )));
        }
    }
    for (_, bbox) in frames {
        bbox.validate()?;
    }
    Ok(())
}
