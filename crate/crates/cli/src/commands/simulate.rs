//! `tubekit simulate`: render a scenario's ground truth, detections, and
//! optional frames/heatmaps into an output directory.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use tubekit_core::detect::write_heatmap;
use tubekit_core::detect::write_detections;
use tubekit_core::imaging::io::write_raw_frames;
use tubekit_core::sim::{
    read_scenario, render_frames, render_ground_truth, render_heatmaps, synth_detections,
    NoiseParams, Scenario,
};
use tubekit_core::tubes::write_tubes;

/// Inputs for one simulation run.
#[derive(Debug, Clone)]
pub struct SimulateOptions {
    pub scenario: PathBuf,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Write the rendered frame sequence to `frames.raw`.
    pub render_frames: bool,
    /// Write per-frame heatmaps to `heatmaps/NNNNNN.hm`.
    pub emit_heatmaps: bool,
    pub down_ratio: usize,
    /// Ignore the scenario's noise block and emit exact detections.
    pub noiseless: bool,
}

/// What the run produced, for the diagnostic summary.
#[derive(Debug, Clone)]
pub struct SimulateSummary {
    pub scenario: Scenario,
    pub gt_tubes: usize,
    pub detections: usize,
    pub frames_written: bool,
    pub heatmaps_written: bool,
}

pub fn run(opts: &SimulateOptions) -> Result<SimulateSummary> {
    let scenario = read_scenario(&opts.scenario)?;
    fs::create_dir_all(&opts.out_dir)
        .with_context(|| format!("creating {}", opts.out_dir.display()))?;

    let gt = render_ground_truth(&scenario)?;
    let records = gt.to_records();
    write_tubes(opts.out_dir.join("ground_truth.jsonl"), &records)?;

    let noise = if opts.noiseless {
        NoiseParams::default()
    } else {
        scenario.noise.unwrap_or_default()
    };
    let dets = synth_detections(&scenario, &noise, opts.seed)?;
    let total_dets: usize = dets.iter().map(Vec::len).sum();
    write_detections(
        opts.out_dir.join("detections.jsonl"),
        dets.iter().enumerate().map(|(t, d)| (t as u64, d.as_slice())),
    )?;

    if opts.render_frames {
        let frames = render_frames(&scenario, opts.seed)?;
        write_raw_frames(opts.out_dir.join("frames.raw"), &frames)?;
    }
    if opts.emit_heatmaps {
        let maps = render_heatmaps(&scenario, opts.down_ratio, opts.seed)?;
        let dir = opts.out_dir.join("heatmaps");
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        for (t, set) in maps.iter().enumerate() {
            write_heatmap(heatmap_path(&dir, t as u64), set)?;
        }
    }

    Ok(SimulateSummary {
        scenario,
        gt_tubes: records.len(),
        detections: total_dets,
        frames_written: opts.render_frames,
        heatmaps_written: opts.emit_heatmaps,
    })
}

/// The canonical name for frame `t`'s heatmap file.
pub fn heatmap_path(dir: &Path, t: u64) -> PathBuf {
    dir.join(format!("{t:06}.hm"))
}
