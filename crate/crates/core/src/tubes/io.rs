//! Tube serialization: one JSON object per line, one line per tube.
//!
//! ```json
//! {"id":0,"class":2,"score":0.81,"frames":[{"t":4,"box":[8.0,17.0,28.0,27.0],"extrapolated":false}]}
//! ```
//!
//! Ground-truth files carry an extra `"video"` field naming the clip a tube
//! belongs to; predicted tubes for a single clip may omit it.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detect::BBox;
use crate::error::{Error, Result};
use crate::tubes::{ActionTube, TubeFrame};

/// One frame of a serialized tube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeFrameRecord {
    pub t: u64,
    #[serde(rename = "box")]
    pub bbox: BBox,
    #[serde(default, skip_serializing_if = "is_false")]
    pub extrapolated: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn default_score() -> f64 {
    1.0
}

/// A serialized tube. `video` tags ground-truth tubes with their clip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u64>,
    pub class: usize,
    #[serde(default = "default_score")]
    pub score: f64,
    pub frames: Vec<TubeFrameRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub video: Option<String>,
}

impl TubeRecord {
    /// Checks structural invariants: at least one frame, strictly
    /// consecutive frame indices, finite score.
    pub fn validate(&self) -> Result<()> {
        if self.frames.is_empty() {
            return Err(Error::invalid("tube has no frames"));
        }
        if !self.score.is_finite() {
            return Err(Error::invalid(format!("tube score {} is not finite", self.score)));
        }
        for pair in self.frames.windows(2) {
            if pair[1].t != pair[0].t + 1 {
                return Err(Error::invalid(format!(
                    "tube frames must be consecutive: {} followed by {}",
                    pair[0].t, pair[1].t
                )));
            }
        }
        for f in &self.frames {
            f.bbox.validate()?;
        }
        Ok(())
    }

    pub fn start(&self) -> u64 {
        self.frames.first().map(|f| f.t).unwrap_or(0)
    }

    pub fn end(&self) -> u64 {
        self.frames.last().map(|f| f.t).unwrap_or(0)
    }
}

impl From<&ActionTube> for TubeRecord {
    fn from(tube: &ActionTube) -> Self {
        TubeRecord {
            id: Some(tube.id),
            class: tube.class_label,
            score: tube.score,
            frames: tube
                .frames
                .iter()
                .map(|f: &TubeFrame| TubeFrameRecord {
                    t: f.t,
                    bbox: f.bbox,
                    extrapolated: f.extrapolated,
                })
                .collect(),
            video: None,
        }
    }
}

/// Writes tubes as JSON lines.
pub fn write_tubes<P: AsRef<Path>>(path: P, tubes: &[TubeRecord]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for tube in tubes {
        serde_json::to_writer(&mut out, tube)
            .map_err(|e| Error::invalid(format!("serializing tube: {e}")))?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads and validates tubes from a JSON-lines file. Blank lines are
/// ignored; malformed lines report their 1-based line number.
pub fn read_tubes<P: AsRef<Path>>(path: P) -> Result<Vec<TubeRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut tubes = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: TubeRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: e.to_string(),
        })?;
        record.validate().map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: e.to_string(),
        })?;
        tubes.push(record);
    }
    Ok(tubes)
}
