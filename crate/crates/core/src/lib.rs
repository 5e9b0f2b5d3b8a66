//! Core library for the tubekit pipeline: temporal similarity maps computed
//! from consecutive video frames, keypoint-heatmap decoding into per-frame
//! detections, online linking of detections into action tubes, and
//! frame-level / video-level average-precision evaluation.
//!
//! The crate is organised around the pipeline stages:
//!
//! * [`imaging`] — frames, structural-similarity maps, shift-candidate
//!   selection, and cascaded (image + temporal map) network inputs.
//! * [`detect`] — bounding boxes, heatmap decoding, non-maximum suppression,
//!   and detection file I/O.
//! * [`tubes`] — the online tube linker: greedy IoU association,
//!   short-horizon extrapolation through missed detections, and incremental
//!   label/score updates.
//! * [`eval`] — PR curves, frame-mAP, and video-mAP over spatio-temporal
//!   tube overlap.
//! * [`sim`] — synthetic scenarios, renderers, noisy detection streams, and
//!   brute-force reference implementations used to cross-check the fast
//!   paths.
//! * [`config`] — TOML pipeline configuration shared by the CLI and tests.

pub mod config;
pub mod detect;
pub mod error;
pub mod eval;
pub mod imaging;
pub mod sim;
pub mod tubes;

pub use error::{Error, Result};
