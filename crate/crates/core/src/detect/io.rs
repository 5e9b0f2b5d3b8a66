//! Detection file I/O: JSONL with one line per frame.
//!
//! Schema: `{"frame": int, "dets": [{"box": [x1,y1,x2,y2], "scores": [..]}]}`.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detect::bbox::BBox;
use crate::detect::Detection;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct DetRecord {
    #[serde(rename = "box")]
    bbox: BBox,
    scores: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FrameRecord {
    frame: u64,
    dets: Vec<DetRecord>,
}

/// Per-frame detections covering a contiguous frame range starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionStream {
    /// One entry per frame index `0..len`, empty where nothing was detected.
    pub frames: Vec<Vec<Detection>>,
    /// Score-vector length, when any detection is present.
    pub classes: Option<usize>,
}

impl DetectionStream {
    /// Builds a dense stream from sparse `(frame, detections)` pairs.
    pub fn from_pairs(pairs: Vec<(u64, Vec<Detection>)>) -> Result<Self> {
        let mut max_frame = None;
        for (t, dets) in &pairs {
            if dets.iter().any(|d| d.frame != *t) {
                return Err(Error::invalid(format!(
                    "detection frame index disagrees with its group ({t})"
                )));
            }
            max_frame = Some(max_frame.map_or(*t, |m: u64| m.max(*t)));
        }
        let len = max_frame.map_or(0, |m| m as usize + 1);
        let mut frames = vec![Vec::new(); len];
        let mut seen = vec![false; len];
        for (t, dets) in pairs {
            if seen[t as usize] {
                return Err(Error::invalid(format!("frame {t} appears more than once")));
            }
            seen[t as usize] = true;
            frames[t as usize] = dets;
        }
        let mut stream = DetectionStream { frames, classes: None };
        stream.infer_classes()?;
        Ok(stream)
    }

    fn infer_classes(&mut self) -> Result<()> {
        for (t, dets) in self.frames.iter().enumerate() {
            for d in dets {
                match self.classes {
                    None => self.classes = Some(d.scores.len()),
                    Some(c) if c != d.scores.len() => {
                        return Err(Error::invalid(format!(
                            "frame {t}: score vector length {} differs from {}",
                            d.scores.len(),
                            c
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// `(frame index, detections)` pairs in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, &[Detection])> {
        self.frames.iter().enumerate().map(|(t, d)| (t as u64, d.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Reads a detections JSONL file into a dense per-frame stream: frames come
/// back in ascending order and indices absent from the file yield empty
/// lists. Malformed lines report their line number; score vectors must all
/// share one length.
pub fn read_detections(path: impl AsRef<Path>) -> Result<DetectionStream> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut pairs: Vec<(u64, Vec<Detection>)> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: FrameRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg: e.to_string(),
        })?;
        let frame = record.frame;
        let mut dets = Vec::with_capacity(record.dets.len());
        for (i, d) in record.dets.into_iter().enumerate() {
            d.bbox.validate().map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: format!("detection {i}: {e}"),
            })?;
            if d.scores.iter().any(|s| !s.is_finite() || *s < 0.0 || *s > 1.0) {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno + 1,
                    msg: format!("detection {i}: scores must lie in [0, 1]"),
                });
            }
            dets.push(Detection::new(frame, d.bbox, d.scores));
        }
        pairs.push((frame, dets));
    }
    DetectionStream::from_pairs(pairs).map_err(|e| match e {
        Error::Invalid(msg) => Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            msg,
        },
        other => other,
    })
}

/// Writes per-frame detections as JSONL, one line per frame in the given
/// order. Values round-trip losslessly through [`read_detections`].
pub fn write_detections<'a>(
    path: impl AsRef<Path>,
    frames: impl IntoIterator<Item = (u64, &'a [Detection])>,
) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for (frame, dets) in frames {
        let record = FrameRecord {
            frame,
            dets: dets
                .iter()
                .map(|d| DetRecord {
                    bbox: d.bbox,
                    scores: d.scores.clone(),
                })
                .collect(),
        };
        let line = serde_json::to_string(&record).expect("detection records serialise");
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
