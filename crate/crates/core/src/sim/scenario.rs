//! Synthetic scenario descriptions and their expansion into ground truth.
//!
//! A scenario is a small JSON document: frame geometry, a class count, a
//! set of actors with motion models, optional occlusion windows, optional
//! background drift, and optional default noise parameters. Example:
//!
//! ```json
//! {
//!   "name": "crossing",
//!   "frames": 60,
//!   "width": 256,
//!   "height": 256,
//!   "classes": 3,
//!   "channels": 1,
//!   "drift": [1, 0],
//!   "actors": [
//!     {"class": 0, "start": 0, "end": 59, "size": [24.0, 32.0],
//!      "path": {"kind": "constant", "origin": [10.0, 40.0], "velocity": [2.0, 0.0]}},
//!     {"class": 2, "start": 10, "end": 50, "size": [20.0, 20.0],
//!      "path": {"kind": "waypoints", "points": [[10, 200.0, 30.0], [30, 120.0, 90.0], [50, 200.0, 150.0]]}}
//!   ],
//!   "occlusions": [{"actor": 1, "start": 25, "end": 28}],
//!   "noise": {"p_miss": 0.1, "jitter_sigma": 1.5, "fp_rate": 0.5, "score_range": [0.5, 0.95]}
//! }
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detect::BBox;
use crate::error::{Error, Result};
use crate::eval::{GroundTruth, GtTube};

/// How an actor's box origin (top-left corner) moves over its lifetime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MotionPath {
    /// `origin + velocity * (t - start)`.
    Constant { origin: (f64, f64), velocity: (f64, f64) },
    /// Piecewise-linear interpolation through `(frame, x, y)` waypoints; the
    /// first waypoint must sit at the actor's start frame and the last at
    /// its end frame.
    Waypoints { points: Vec<(u64, f64, f64)> },
}

/// One synthetic actor: a class, a lifetime, a box size, and a motion path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Actor {
    pub class: usize,
    pub start: u64,
    /// Inclusive last frame.
    pub end: u64,
    /// Box `(width, height)` in pixels.
    pub size: (f64, f64),
    pub path: MotionPath,
}

/// A window during which an actor is hidden: it is neither drawn nor
/// detected, though it stays in the ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Occlusion {
    /// Index into the scenario's actor list.
    pub actor: usize,
    pub start: u64,
    /// Inclusive last hidden frame.
    pub end: u64,
}

/// Detection noise: dropout, corner jitter, spurious boxes, and the score
/// range for emitted detections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    /// Probability of dropping a visible ground-truth box.
    pub p_miss: f64,
    /// Standard deviation of Gaussian corner jitter, in pixels.
    pub jitter_sigma: f64,
    /// Expected false positives per frame (Poisson).
    pub fp_rate: f64,
    /// `[low, high]` range the peak class score is drawn from.
    pub score_range: (f64, f64),
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            p_miss: 0.0,
            jitter_sigma: 0.0,
            fp_rate: 0.0,
            score_range: (1.0, 1.0),
        }
    }
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_miss) {
            return Err(Error::invalid(format!("p_miss must lie in [0, 1], got {}", self.p_miss)));
        }
        if !(self.jitter_sigma >= 0.0) || !self.jitter_sigma.is_finite() {
            return Err(Error::invalid(format!("jitter_sigma must be >= 0, got {}", self.jitter_sigma)));
        }
        if !(self.fp_rate >= 0.0) || !self.fp_rate.is_finite() {
            return Err(Error::invalid(format!("fp_rate must be >= 0, got {}", self.fp_rate)));
        }
        let (lo, hi) = self.score_range;
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::invalid(format!("score range [{lo}, {hi}] must satisfy 0 <= lo <= hi <= 1")));
        }
        Ok(())
    }
}

fn default_channels() -> u8 {
    1
}

/// A complete synthetic scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Number of frames.
    pub frames: u64,
    pub width: u32,
    pub height: u32,
    pub classes: usize,
    #[serde(default = "default_channels")]
    pub channels: u8,
    /// Per-frame background pan in pixels; components must be -1, 0, or 1.
    /// Shifting frame `t` by this vector realigns it with frame `t - 1`.
    #[serde(default)]
    pub drift: Option<(i32, i32)>,
    pub actors: Vec<Actor>,
    #[serde(default)]
    pub occlusions: Vec<Occlusion>,
    /// Default noise for detection synthesis; commands may override it.
    #[serde(default)]
    pub noise: Option<NoiseParams>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::invalid("scenario needs at least one frame"));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::invalid(format!(
                "frame size must be positive, got {}x{}",
                self.width, self.height
            )));
        }
        if self.classes == 0 {
            return Err(Error::invalid("scenario needs at least one class"));
        }
        if self.channels != 1 && self.channels != 3 {
            return Err(Error::invalid(format!("channels must be 1 or 3, got {}", self.channels)));
        }
        if let Some((dx, dy)) = self.drift {
            if dx.abs() > 1 || dy.abs() > 1 {
                return Err(Error::invalid(format!("drift components must be -1, 0, or 1, got ({dx}, {dy})")));
            }
        }
        for (idx, actor) in self.actors.iter().enumerate() {
            if actor.class >= self.classes {
                return Err(Error::invalid(format!(
                    "actor {idx} has class {} but the scenario declares {} classes",
                    actor.class, self.classes
                )));
            }
            if actor.start > actor.end || actor.end >= self.frames {
                return Err(Error::invalid(format!(
                    "actor {idx} lifetime [{}, {}] must fit inside 0..{}",
                    actor.start, actor.end, self.frames
                )));
            }
            if !(actor.size.0 > 0.0) || !(actor.size.1 > 0.0) {
                return Err(Error::invalid(format!("actor {idx} needs a positive box size")));
            }
            if let MotionPath::Waypoints { points } = &actor.path {
                if points.is_empty() {
                    return Err(Error::invalid(format!("actor {idx} has no waypoints")));
                }
                if points[0].0 != actor.start || points[points.len() - 1].0 != actor.end {
                    return Err(Error::invalid(format!(
                        "actor {idx}: waypoints must start at frame {} and end at frame {}",
                        actor.start, actor.end
                    )));
                }
                for pair in points.windows(2) {
                    if pair[1].0 <= pair[0].0 {
                        return Err(Error::invalid(format!(
                            "actor {idx}: waypoint frames must be strictly increasing"
                        )));
                    }
                }
            }
            for t in actor.start..=actor.end {
                let bbox = self.actor_box(idx, t).expect("t is inside the lifetime");
                if bbox.x1 < 0.0
                    || bbox.y1 < 0.0
                    || bbox.x2 > f64::from(self.width)
                    || bbox.y2 > f64::from(self.height)
                {
                    return Err(Error::invalid(format!(
                        "actor {idx} leaves the frame at t={t}: {bbox:?}"
                    )));
                }
            }
        }
        for (oi, occ) in self.occlusions.iter().enumerate() {
            let actor = self.actors.get(occ.actor).ok_or_else(|| {
                Error::invalid(format!("occlusion {oi} names actor {} which does not exist", occ.actor))
            })?;
            if occ.start > occ.end || occ.start < actor.start || occ.end > actor.end {
                return Err(Error::invalid(format!(
                    "occlusion {oi} window [{}, {}] must lie inside actor {}'s lifetime [{}, {}]",
                    occ.start, occ.end, occ.actor, actor.start, actor.end
                )));
            }
        }
        if let Some(noise) = &self.noise {
            noise.validate()?;
        }
        Ok(())
    }

    /// The actor's box at frame `t`, or `None` outside its lifetime.
    pub fn actor_box(&self, actor: usize, t: u64) -> Option<BBox> {
        let a = self.actors.get(actor)?;
        if t < a.start || t > a.end {
            return None;
        }
        let (x, y) = match &a.path {
            MotionPath::Constant { origin, velocity } => {
                let dt = (t - a.start) as f64;
                (origin.0 + velocity.0 * dt, origin.1 + velocity.1 * dt)
            }
            MotionPath::Waypoints { points } => interpolate_waypoints(points, t),
        };
        Some(BBox {
            x1: x,
            y1: y,
            x2: x + a.size.0,
            y2: y + a.size.1,
        })
    }

    /// True when `actor` is inside one of its occlusion windows at `t`.
    pub fn is_occluded(&self, actor: usize, t: u64) -> bool {
        self.occlusions
            .iter()
            .any(|o| o.actor == actor && o.start <= t && t <= o.end)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let sc: Scenario =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("scenario JSON: {e}")))?;
        sc.validate()?;
        Ok(sc)
    }
}

fn interpolate_waypoints(points: &[(u64, f64, f64)], t: u64) -> (f64, f64) {
    debug_assert!(!points.is_empty());
    if t <= points[0].0 {
        return (points[0].1, points[0].2);
    }
    for pair in points.windows(2) {
        let (t0, x0, y0) = pair[0];
        let (t1, x1, y1) = pair[1];
        if t <= t1 {
            let alpha = (t - t0) as f64 / (t1 - t0) as f64;
            return (x0 + alpha * (x1 - x0), y0 + alpha * (y1 - y0));
        }
    }
    let last = points[points.len() - 1];
    (last.1, last.2)
}

/// Reads and validates a scenario JSON file.
pub fn read_scenario<P: AsRef<Path>>(path: P) -> Result<Scenario> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Scenario::from_json(&text)
}

/// Writes a scenario as pretty JSON.
pub fn write_scenario<P: AsRef<Path>>(path: P, scenario: &Scenario) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, scenario.to_json()).map_err(|e| Error::io(path, e))
}

/// Expands the motion models into per-frame ground-truth tubes; the video
/// name is the scenario name. Occlusions do not remove ground truth.
pub fn render_ground_truth(scenario: &Scenario) -> Result<GroundTruth> {
    scenario.validate()?;
    let mut gt = GroundTruth::new();
    for (idx, actor) in scenario.actors.iter().enumerate() {
        let frames: Vec<(u64, BBox)> = (actor.start..=actor.end)
            .map(|t| (t, scenario.actor_box(idx, t).expect("t inside lifetime")))
            .collect();
        gt.add_tube(&scenario.name, GtTube::new(actor.class, frames)?);
    }
    Ok(gt)
}
