//! Cascaded inputs: current-frame channels stacked with temporal-map channels.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::candidate::{select_candidate, select_candidate_topk, Selection};
use crate::imaging::frame::{Frame, ShiftDirection};
use crate::imaging::ssim::{SsimParams, TemporalMap};

/// What the temporal channels of a cascaded input contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemporalMode {
    /// Similarity map of the best shift candidate against the past frame.
    Ssmap,
    /// Dissimilarity map `(1 - s) / 2` of the best candidate.
    Dsim,
    /// The raw past frame, with no candidate selection.
    RawPrev,
    /// No temporal channels; the cascaded input is the frame alone.
    None,
}

impl TemporalMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            TemporalMode::Ssmap => "ssmap",
            TemporalMode::Dsim => "dsim",
            TemporalMode::RawPrev => "raw_prev",
            TemporalMode::None => "none",
        }
    }
}

impl std::str::FromStr for TemporalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ssmap" => Ok(TemporalMode::Ssmap),
            "dsim" => Ok(TemporalMode::Dsim),
            "raw_prev" => Ok(TemporalMode::RawPrev),
            "none" => Ok(TemporalMode::None),
            other => Err(Error::invalid(format!(
                "unknown temporal mode {other:?} (expected ssmap, dsim, raw_prev, or none)"
            ))),
        }
    }
}

/// A detector input: the current frame's channels followed by zero or more
/// temporal channels, all planar and equally sized.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadedInput {
    width: usize,
    height: usize,
    image_channels: usize,
    temporal_channels: usize,
    /// Shift chosen for the temporal channels, when selection ran.
    pub selected: Option<ShiftDirection>,
    data: Vec<f64>,
}

impl CascadedInput {
    fn assemble(
        frame: &Frame,
        temporal: Option<&[f64]>,
        temporal_channels: usize,
        selected: Option<ShiftDirection>,
    ) -> Self {
        let (w, h, ch) = frame.shape();
        let mut data = Vec::with_capacity(w * h * (ch + temporal_channels));
        data.extend_from_slice(frame.data());
        if let Some(t) = temporal {
            debug_assert_eq!(t.len(), w * h * temporal_channels);
            data.extend_from_slice(t);
        }
        CascadedInput {
            width: w,
            height: h,
            image_channels: ch,
            temporal_channels,
            selected,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Channels copied from the source frame.
    pub fn image_channels(&self) -> usize {
        self.image_channels
    }

    /// Appended temporal channels.
    pub fn temporal_channels(&self) -> usize {
        self.temporal_channels
    }

    /// Total channel count.
    pub fn channels(&self) -> usize {
        self.image_channels + self.temporal_channels
    }

    /// Row-major plane `c` (image planes first, temporal planes after).
    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.width * self.height;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Builds the default cascaded input for one frame pair: the current frame's
/// channels followed by the similarity-map channels of the best shift
/// candidate against `past` (mode [`TemporalMode::Ssmap`], top-1 selection).
pub fn build_cascaded_input(current: &Frame, past: &Frame, params: &SsimParams) -> Result<CascadedInput> {
    let sel = select_candidate(current, past, params)?;
    Ok(CascadedInput::assemble(
        current,
        Some(sel.map.data()),
        sel.map.channels(),
        Some(sel.direction),
    ))
}

/// Settings for the streaming temporal stage.
#[derive(Debug, Clone)]
pub struct TemporalSettings {
    pub mode: TemporalMode,
    /// Distance (in frames) between the current and the past frame; 1 pairs
    /// consecutive frames.
    pub frame_gap: usize,
    /// Candidates eligible for the randomised draw; 1 always takes the best.
    pub topk: usize,
    /// Seed for the randomised draw when `topk > 1`.
    pub seed: u64,
    pub params: SsimParams,
}

impl Default for TemporalSettings {
    fn default() -> Self {
        TemporalSettings {
            mode: TemporalMode::Ssmap,
            frame_gap: 1,
            topk: 1,
            seed: 0,
            params: SsimParams::default(),
        }
    }
}

impl TemporalSettings {
    pub fn validate(&self) -> Result<()> {
        if self.frame_gap == 0 {
            return Err(Error::invalid("frame gap must be >= 1"));
        }
        if self.topk == 0 || self.topk > 9 {
            return Err(Error::invalid(format!("top-k must lie in 1..=9, got {}", self.topk)));
        }
        Ok(())
    }
}

/// Shift and score of the candidate chosen for a frame.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SelectionSummary {
    pub direction: ShiftDirection,
    pub mean_ssim: f64,
}

/// One cascaded input emitted by the streaming stage.
#[derive(Debug, Clone)]
pub struct TemporalOutput {
    pub frame_index: u64,
    pub input: CascadedInput,
    /// Present for modes that run candidate selection.
    pub selection: Option<SelectionSummary>,
}

/// Streaming temporal stage: feeds frames in order, keeps the short history
/// needed for the configured frame gap, and emits one cascaded input per
/// frame.
///
/// During warm-up (fewer than `frame_gap` frames seen), the oldest available
/// frame stands in as the past frame; the very first frame is paired with
/// itself, yielding an all-ones similarity map.
#[derive(Debug)]
pub struct TemporalPreprocessor {
    settings: TemporalSettings,
    history: VecDeque<Frame>,
}

impl TemporalPreprocessor {
    pub fn new(settings: TemporalSettings) -> Result<Self> {
        settings.validate()?;
        Ok(TemporalPreprocessor {
            settings,
            history: VecDeque::new(),
        })
    }

    pub fn settings(&self) -> &TemporalSettings {
        &self.settings
    }

    /// Per-frame seed for the randomised draw, mixed so consecutive frames
    /// draw independently while staying reproducible.
    fn frame_seed(&self, index: u64) -> u64 {
        self.settings
            .seed
            .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn select(&self, current: &Frame, past: &Frame) -> Result<Selection> {
        if self.settings.topk <= 1 {
            select_candidate(current, past, &self.settings.params)
        } else {
            select_candidate_topk(
                current,
                past,
                &self.settings.params,
                self.settings.topk,
                self.frame_seed(current.index),
            )
        }
    }

    /// Consumes the next frame and produces its cascaded input.
    pub fn process(&mut self, frame: Frame) -> Result<TemporalOutput> {
        if let Some(prev) = self.history.back() {
            if frame.shape() != prev.shape() {
                return Err(Error::invalid(format!(
                    "frame {} changed shape: {:?} vs {:?}",
                    frame.index,
                    frame.shape(),
                    prev.shape()
                )));
            }
        }
        let output = match self.settings.mode {
            TemporalMode::None => TemporalOutput {
                frame_index: frame.index,
                input: CascadedInput::assemble(&frame, None, 0, None),
                selection: None,
            },
            TemporalMode::RawPrev => {
                let past = self.history.front().unwrap_or(&frame);
                TemporalOutput {
                    frame_index: frame.index,
                    input: CascadedInput::assemble(&frame, Some(past.data()), past.channels(), None),
                    selection: None,
                }
            }
            TemporalMode::Ssmap | TemporalMode::Dsim => {
                let past = self.history.front().unwrap_or(&frame);
                let sel = self.select(&frame, past)?;
                let map: TemporalMap = if self.settings.mode == TemporalMode::Dsim {
                    sel.map.clone().map_values(|v| (1.0 - v) / 2.0)
                } else {
                    sel.map.clone()
                };
                TemporalOutput {
                    frame_index: frame.index,
                    input: CascadedInput::assemble(
                        &frame,
                        Some(map.data()),
                        map.channels(),
                        Some(sel.direction),
                    ),
                    selection: Some(SelectionSummary {
                        direction: sel.direction,
                        mean_ssim: sel.mean_ssim,
                    }),
                }
            }
        };
        self.history.push_back(frame);
        while self.history.len() > self.settings.frame_gap {
            self.history.pop_front();
        }
        Ok(output)
    }
}
