//! Synthetic data: scripted scenarios with moving actors, rendered frames
//! and heatmaps, noisy detection streams, and the brute-force oracles the
//! test suite checks the pipeline against.

mod oracle;
mod render;
mod scenario;
mod synth;

pub use oracle::{
    oracle_decode, oracle_frame_ap, oracle_link, oracle_map_suite, oracle_ssim_map,
    oracle_video_ap,
};
pub use render::{render_frames, render_heatmaps};
pub use scenario::{
    read_scenario, render_ground_truth, write_scenario, Actor, MotionPath, NoiseParams,
    Occlusion, Scenario,
};
pub use synth::synth_detections;
