//! `tubekit bench`: per-stage latency on a synthetic scenario.
//!
//! All inputs (frames, heatmaps, detection streams) are rendered up front so
//! the timings cover pure compute, never I/O. Each stage is timed per frame
//! after a warm-up, cycling through the rendered inputs when the scenario is
//! shorter than the timed span, and each temporal mode gets its own row.

use std::time::Instant;

use anyhow::{bail, Result};
use tubekit_core::config::PipelineConfig;
use tubekit_core::detect::decode_heatmaps;
use tubekit_core::imaging::{TemporalMode, TemporalPreprocessor};
use tubekit_core::sim::{
    render_frames, render_heatmaps, synth_detections, Actor, MotionPath, NoiseParams, Occlusion,
    Scenario,
};
use tubekit_core::tubes::TubeLinker;

use crate::commands::link::class_nms;
use crate::timing::TimingReport;

/// Every mode the temporal stage supports, in the order rows are reported.
pub const ALL_MODES: [TemporalMode; 4] =
    [TemporalMode::Ssmap, TemporalMode::Dsim, TemporalMode::RawPrev, TemporalMode::None];

#[derive(Debug, Clone, Copy)]
pub struct BenchOptions {
    /// Timed frames per stage; at least 500 for a stable report.
    pub timed_frames: usize,
    /// Untimed frames run first to settle caches and allocators.
    pub warmup: usize,
    pub seed: u64,
    /// Down-sampling ratio of the rendered heatmaps.
    pub down_ratio: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { timed_frames: 500, warmup: 32, seed: 0, down_ratio: 4 }
    }
}

/// The scenario used when none is given: full-resolution colour frames with
/// two moving actors, background drift, a short occlusion, and mild noise.
pub fn default_scenario() -> Scenario {
    Scenario {
        name: "bench".into(),
        frames: 48,
        width: 256,
        height: 256,
        classes: 2,
        channels: 3,
        drift: Some((1, 0)),
        actors: vec![
            Actor {
                class: 0,
                start: 0,
                end: 47,
                size: (40.0, 28.0),
                path: MotionPath::Constant { origin: (10.0, 30.0), velocity: (2.0, 1.0) },
            },
            Actor {
                class: 1,
                start: 0,
                end: 47,
                size: (32.0, 32.0),
                path: MotionPath::Constant { origin: (180.0, 200.0), velocity: (-1.5, -2.0) },
            },
        ],
        occlusions: vec![Occlusion { actor: 0, start: 20, end: 24 }],
        noise: Some(NoiseParams {
            p_miss: 0.05,
            jitter_sigma: 1.0,
            fp_rate: 0.5,
            score_range: (0.5, 0.95),
        }),
    }
}

pub fn run(
    cfg: &PipelineConfig,
    scenario: &Scenario,
    modes: &[TemporalMode],
    opts: &BenchOptions,
) -> Result<Vec<TimingReport>> {
    if opts.timed_frames < 500 {
        bail!("at least 500 timed frames are required for a stable report, got {}", opts.timed_frames);
    }
    if opts.warmup == 0 {
        bail!("at least one warm-up frame is required");
    }
    scenario.validate()?;

    // Everything the stages consume is materialized here, outside the timers.
    let frames = render_frames(scenario, opts.seed)?;
    let heatmaps = render_heatmaps(scenario, opts.down_ratio, opts.seed)?;
    let noise = scenario.noise.unwrap_or_default();
    let dets = synth_detections(scenario, &noise, opts.seed)?;
    let decode_cfg = cfg.decode_config();
    let bounds = Some((f64::from(scenario.width), f64::from(scenario.height)));
    let total = opts.warmup + opts.timed_frames;

    // The link stage steps frame t with the scenario's detections for
    // t mod frames, restamped so the stream stays consecutive.
    let link_stream: Vec<Vec<tubekit_core::detect::Detection>> = (0..total)
        .map(|i| {
            dets[i % dets.len()]
                .iter()
                .map(|d| {
                    let mut d = d.clone();
                    d.frame = i as u64;
                    d
                })
                .collect()
        })
        .collect();

    let mut reports = Vec::with_capacity(modes.len());
    for &mode in modes {
        let mut mode_cfg = *cfg;
        mode_cfg.temporal.mode = mode;

        let mut temporal = Vec::with_capacity(opts.timed_frames);
        let mut pre = TemporalPreprocessor::new(mode_cfg.temporal_settings()?)?;
        for i in 0..total {
            let mut frame = frames[i % frames.len()].clone();
            frame.index = i as u64;
            let start = Instant::now();
            let out = pre.process(frame)?;
            let elapsed = start.elapsed();
            std::hint::black_box(&out);
            if i >= opts.warmup {
                temporal.push(elapsed.as_secs_f64() * 1e3);
            }
        }

        let mut decode = Vec::with_capacity(opts.timed_frames);
        for i in 0..total {
            let set = &heatmaps[i % heatmaps.len()];
            let start = Instant::now();
            let decoded = decode_heatmaps(set, i as u64, &decode_cfg);
            let kept = class_nms(&decoded, set.classes(), mode_cfg.detect.nms_iou, mode_cfg.detect.top_n);
            let elapsed = start.elapsed();
            std::hint::black_box(&kept);
            if i >= opts.warmup {
                decode.push(elapsed.as_secs_f64() * 1e3);
            }
        }

        let mut link = Vec::with_capacity(opts.timed_frames);
        let mut linker = TubeLinker::new(mode_cfg.linker_config(bounds))?;
        for (i, frame_dets) in link_stream.iter().enumerate() {
            let start = Instant::now();
            linker.step(i as u64, frame_dets)?;
            let elapsed = start.elapsed();
            if i >= opts.warmup {
                link.push(elapsed.as_secs_f64() * 1e3);
            }
        }
        std::hint::black_box(linker.live());

        reports.push(TimingReport::new(mode, &temporal, &decode, &link));
    }
    Ok(reports)
}
