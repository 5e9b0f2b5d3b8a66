//! Frames, structural-similarity temporal maps, and cascaded network inputs.
//!
//! The temporal stage of the pipeline compares the current frame against a
//! small set of one-pixel-shifted copies of itself, picks the shift that best
//! matches a past frame (a cheap stand-in for dominant inter-frame motion),
//! and emits a per-pixel similarity map that is stacked onto the current
//! frame as extra input channels for the detector.

mod candidate;
mod cascade;
mod frame;
pub mod io;
mod ssim;

pub use candidate::{candidate_scores, select_candidate, select_candidate_topk, Selection, CANDIDATE_DIRECTIONS};
pub use cascade::{
    build_cascaded_input, CascadedInput, SelectionSummary, TemporalMode, TemporalOutput,
    TemporalPreprocessor, TemporalSettings,
};
pub use frame::{shift_frame, Frame, ShiftDirection};
pub use ssim::{dsim_map, ssim_map, SsimParams, TemporalMap, K1, K2};
