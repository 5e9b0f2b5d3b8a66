//! Command-line frontend for the tubekit pipeline.
//!
//! The binary exposes one subcommand per pipeline stage plus harnesses:
//!
//! * `preprocess` — temporal maps and a shift-selection manifest from frames.
//! * `link` — action tubes from detections or decoded heatmaps.
//! * `eval` — frame-mAP and video-mAP against ground truth.
//! * `bench` — per-stage latency on a synthetic scenario.
//! * `sweep` — metric tables across one parameter's value range.
//! * `simulate` — scenario rendering: ground truth, detections, frames,
//!   heatmaps.
//!
//! Every command is deterministic given its configuration and seeds; only
//! wall-clock measurements vary between runs. The command implementations
//! live in [`commands`] as plain functions so tests and other tooling can
//! drive them without a process boundary.

pub mod commands;
pub mod opts;
pub mod timing;

pub use opts::{dispatch, Cli, Command, ConfigArgs, CONFIG_ENV};
